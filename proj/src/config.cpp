#include "dexgrasp/config.hpp"

#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "dexgrasp/errors.hpp"

namespace dexgrasp {

using nlohmann::json;

namespace {

const char* refine_method_name(em::RefineMethod m) {
    switch (m) {
        case em::RefineMethod::GA1: return "GA1";
        case em::RefineMethod::GA2: return "GA2";
        case em::RefineMethod::GA3: return "GA3";
        case em::RefineMethod::SA1: return "SA1";
        case em::RefineMethod::SA2: return "SA2";
        case em::RefineMethod::SA3: return "SA3";
    }
    return "GA3";
}

em::RefineMethod refine_method_from(const std::string& name) {
    if (name == "GA1") return em::RefineMethod::GA1;
    if (name == "GA2") return em::RefineMethod::GA2;
    if (name == "GA3") return em::RefineMethod::GA3;
    if (name == "SA1") return em::RefineMethod::SA1;
    if (name == "SA2") return em::RefineMethod::SA2;
    if (name == "SA3") return em::RefineMethod::SA3;
    throw IoError("unknown refine method: " + name);
}

const char* balance_name(em::Balance b) {
    switch (b) {
        case em::Balance::None: return "none";
        case em::Balance::Undersample: return "undersample";
        case em::Balance::Oversample: return "oversample";
    }
    return "undersample";
}

em::Balance balance_from(const std::string& name) {
    if (name == "none") return em::Balance::None;
    if (name == "undersample") return em::Balance::Undersample;
    if (name == "oversample") return em::Balance::Oversample;
    throw IoError("unknown balance mode: " + name);
}

template <typename T>
void get_if(const json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

std::string pipeline_config_json(const PipelineConfig& c) {
    json j;
    j["seed"] = c.seed;
    j["learn"] = {{"lambda", c.learn.lambda},
                  {"delta", c.learn.delta},
                  {"alpha", c.learn.alpha},
                  {"beta", c.learn.beta},
                  {"sigma_hc", c.learn.sigma_hc},
                  {"gamma_grid", c.learn.gamma_grid},
                  {"sigma_p", c.learn.bandwidth.sigma_p},
                  {"sigma_q", c.learn.bandwidth.sigma_q},
                  {"sigma_r", c.learn.bandwidth.sigma_r}};
    j["transfer"] = {{"kq", c.kq}};
    j["generation"] = {{"n_seeds", c.generation.n_seeds},
                       {"improve_steps", c.generation.improve_steps},
                       {"prune_interval", c.generation.prune_interval},
                       {"prune_keep", c.generation.prune_keep},
                       {"step_pos", c.generation.step_pos},
                       {"step_rot", c.generation.step_rot},
                       {"step_joint", c.generation.step_joint},
                       {"kq", c.generation.kq},
                       {"check_table", c.generation.check_table},
                       {"table_z", c.generation.table_z},
                       {"retreat", c.generation.retreat}};
    j["oracle"] = {{"contact_tol", c.oracle.contact_tol},
                   {"penetration_limit", c.oracle.penetration_limit},
                   {"cone_edges", c.oracle.cone_edges},
                   {"torsion", c.oracle.torsion},
                   {"safety_factor", c.oracle.safety_factor},
                   {"gravity", c.oracle.gravity},
                   {"max_contact_force", c.oracle.max_contact_force}};
    j["dataset"] = {{"scenes", c.dataset.scenes},
                    {"grasps_per_scene", c.dataset.grasps_per_scene},
                    {"views", c.dataset.views},
                    {"camera_distance", c.dataset.camera_distance},
                    {"voxel", c.dataset.voxel},
                    {"feature_radius", c.dataset.feature_radius},
                    {"split_train", c.dataset.split_train},
                    {"split_validation", c.dataset.split_validation},
                    {"split_test", c.dataset.split_test}};
    j["net"] = {{"vis_channels", c.net.vis_channels},
                {"traj_channels", c.net.traj_channels},
                {"vis_features", c.net.vis_features},
                {"traj_features", c.net.traj_features},
                {"fused_features", c.net.fused_features},
                {"dropout", c.net.dropout},
                {"fuse_add", c.net.fuse_add},
                {"depth_scale", c.net.depth_scale},
                {"mean_curv_scale", c.net.mean_curv_scale},
                {"gauss_curv_scale", c.net.gauss_curv_scale},
                {"init_seed", c.net.init_seed}};
    j["train"] = {{"lr0", c.train.lr0},
                  {"halve_every", c.train.halve_every},
                  {"max_epochs", c.train.max_epochs},
                  {"patience", c.train.patience},
                  {"batch", c.train.batch},
                  {"balance", balance_name(c.train.balance)}};
    j["refine"] = {{"method", refine_method_name(c.refine.method)},
                   {"ga_iterations", c.refine.ga_iterations},
                   {"lr_position", c.refine.lr_position},
                   {"lr_joints", c.refine.lr_joints},
                   {"sa_iterations", c.refine.sa_iterations},
                   {"sa_perturbations", c.refine.sa_perturbations},
                   {"sa_t0", c.refine.sa_t0},
                   {"sa_stall_limit", c.refine.sa_stall_limit},
                   {"sa_position_sigma", c.refine.sa_position_sigma},
                   {"sa_joint_scale_sigma", c.refine.sa_joint_scale_sigma}};
    return j.dump(2);
}

PipelineConfig parse_pipeline_config(const std::string& text) {
    const json j = json::parse(text);
    PipelineConfig c;
    get_if(j, "seed", c.seed);
    if (j.contains("learn")) {
        const json& l = j.at("learn");
        get_if(l, "lambda", c.learn.lambda);
        get_if(l, "delta", c.learn.delta);
        get_if(l, "alpha", c.learn.alpha);
        get_if(l, "beta", c.learn.beta);
        get_if(l, "sigma_hc", c.learn.sigma_hc);
        get_if(l, "gamma_grid", c.learn.gamma_grid);
        get_if(l, "sigma_p", c.learn.bandwidth.sigma_p);
        get_if(l, "sigma_q", c.learn.bandwidth.sigma_q);
        get_if(l, "sigma_r", c.learn.bandwidth.sigma_r);
    }
    if (j.contains("transfer")) get_if(j.at("transfer"), "kq", c.kq);
    if (j.contains("generation")) {
        const json& g = j.at("generation");
        get_if(g, "n_seeds", c.generation.n_seeds);
        get_if(g, "improve_steps", c.generation.improve_steps);
        get_if(g, "prune_interval", c.generation.prune_interval);
        get_if(g, "prune_keep", c.generation.prune_keep);
        get_if(g, "step_pos", c.generation.step_pos);
        get_if(g, "step_rot", c.generation.step_rot);
        get_if(g, "step_joint", c.generation.step_joint);
        get_if(g, "kq", c.generation.kq);
        get_if(g, "check_table", c.generation.check_table);
        get_if(g, "table_z", c.generation.table_z);
        get_if(g, "retreat", c.generation.retreat);
    }
    if (j.contains("oracle")) {
        const json& o = j.at("oracle");
        get_if(o, "contact_tol", c.oracle.contact_tol);
        get_if(o, "penetration_limit", c.oracle.penetration_limit);
        get_if(o, "cone_edges", c.oracle.cone_edges);
        get_if(o, "torsion", c.oracle.torsion);
        get_if(o, "safety_factor", c.oracle.safety_factor);
        get_if(o, "gravity", c.oracle.gravity);
        get_if(o, "max_contact_force", c.oracle.max_contact_force);
    }
    if (j.contains("dataset")) {
        const json& d = j.at("dataset");
        get_if(d, "scenes", c.dataset.scenes);
        get_if(d, "grasps_per_scene", c.dataset.grasps_per_scene);
        get_if(d, "views", c.dataset.views);
        get_if(d, "camera_distance", c.dataset.camera_distance);
        get_if(d, "voxel", c.dataset.voxel);
        get_if(d, "feature_radius", c.dataset.feature_radius);
        get_if(d, "split_train", c.dataset.split_train);
        get_if(d, "split_validation", c.dataset.split_validation);
        get_if(d, "split_test", c.dataset.split_test);
    }
    if (j.contains("net")) {
        const json& n = j.at("net");
        get_if(n, "vis_channels", c.net.vis_channels);
        get_if(n, "traj_channels", c.net.traj_channels);
        get_if(n, "vis_features", c.net.vis_features);
        get_if(n, "traj_features", c.net.traj_features);
        get_if(n, "fused_features", c.net.fused_features);
        get_if(n, "dropout", c.net.dropout);
        get_if(n, "fuse_add", c.net.fuse_add);
        get_if(n, "depth_scale", c.net.depth_scale);
        get_if(n, "mean_curv_scale", c.net.mean_curv_scale);
        get_if(n, "gauss_curv_scale", c.net.gauss_curv_scale);
        get_if(n, "init_seed", c.net.init_seed);
    }
    if (j.contains("train")) {
        const json& t = j.at("train");
        get_if(t, "lr0", c.train.lr0);
        get_if(t, "halve_every", c.train.halve_every);
        get_if(t, "max_epochs", c.train.max_epochs);
        get_if(t, "patience", c.train.patience);
        get_if(t, "batch", c.train.batch);
        if (t.contains("balance")) c.train.balance = balance_from(t.at("balance"));
    }
    if (j.contains("refine")) {
        const json& r = j.at("refine");
        if (r.contains("method")) c.refine.method = refine_method_from(r.at("method"));
        get_if(r, "ga_iterations", c.refine.ga_iterations);
        get_if(r, "lr_position", c.refine.lr_position);
        get_if(r, "lr_joints", c.refine.lr_joints);
        get_if(r, "sa_iterations", c.refine.sa_iterations);
        get_if(r, "sa_perturbations", c.refine.sa_perturbations);
        get_if(r, "sa_t0", c.refine.sa_t0);
        get_if(r, "sa_stall_limit", c.refine.sa_stall_limit);
        get_if(r, "sa_position_sigma", c.refine.sa_position_sigma);
        get_if(r, "sa_joint_scale_sigma", c.refine.sa_joint_scale_sigma);
    }
    return c;
}

PipelineConfig load_pipeline_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw IoError("load_pipeline_config: cannot open " + path);
    std::string text((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
    return parse_pipeline_config(text);
}

void save_pipeline_config(const std::string& path, const PipelineConfig& config) {
    std::ofstream os(path);
    if (!os) throw IoError("save_pipeline_config: cannot write " + path);
    os << pipeline_config_json(config) << "\n";
}

std::string config_hash(const PipelineConfig& config) {
    const std::string text = pipeline_config_json(config);
    uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

DatasetConfig make_dataset_config(const PipelineConfig& config,
                                  std::vector<AnalyticObject> objects,
                                  std::vector<GraspModel> models, const std::string& out_dir) {
    DatasetConfig d;
    d.objects = std::move(objects);
    d.models = std::move(models);
    d.scenes = config.dataset.scenes;
    d.grasps_per_scene = config.dataset.grasps_per_scene;
    d.views = config.dataset.views;
    d.seed = config.seed;
    d.out_dir = out_dir;
    d.generation = config.generation;
    d.oracle = config.oracle;
    d.camera_distance = config.dataset.camera_distance;
    d.voxel = config.dataset.voxel;
    d.feature_radius = config.dataset.feature_radius;
    d.split_train = config.dataset.split_train;
    d.split_validation = config.dataset.split_validation;
    d.split_test = config.dataset.split_test;
    return d;
}

void write_run_manifest(const std::string& dir, const std::string& command,
                        const PipelineConfig& config) {
    std::filesystem::create_directories(dir);
    json j;
    j["command"] = command;
    j["seed"] = config.seed;
    j["config_hash"] = config_hash(config);
    std::ofstream os(std::filesystem::path(dir) / "run.json");
    if (!os) throw IoError("write_run_manifest: cannot write under " + dir);
    os << j.dump(2) << "\n";
}

}  // namespace dexgrasp
