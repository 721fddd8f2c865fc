#include "dexgrasp/dataset.hpp"

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <thread>

#include <json.hpp>

#include "dexgrasp/demos.hpp"
#include "dexgrasp/errors.hpp"
#include "dexgrasp/features.hpp"

namespace dexgrasp {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json pose_to_json(const Pose& p) {
    return json{{"p", {p.p.x(), p.p.y(), p.p.z()}},
                {"q", {p.q.w(), p.q.x(), p.q.y(), p.q.z()}}};
}

Pose pose_from_json(const json& j) {
    const auto& p = j.at("p");
    const auto& q = j.at("q");
    return Pose(Vec3(p[0], p[1], p[2]), Quat(q[0], q[1], q[2], q[3]));
}

std::string shape_name(AnalyticObject::Shape s) {
    switch (s) {
        case AnalyticObject::Shape::Sphere: return "sphere";
        case AnalyticObject::Shape::Box: return "box";
        case AnalyticObject::Shape::Cylinder: return "cylinder";
        case AnalyticObject::Shape::Cup: return "cup";
        case AnalyticObject::Shape::Mug: return "mug";
    }
    return "sphere";
}

AnalyticObject::Shape shape_from_name(const std::string& name) {
    if (name == "sphere") return AnalyticObject::Shape::Sphere;
    if (name == "box") return AnalyticObject::Shape::Box;
    if (name == "cylinder") return AnalyticObject::Shape::Cylinder;
    if (name == "cup") return AnalyticObject::Shape::Cup;
    if (name == "mug") return AnalyticObject::Shape::Mug;
    throw IoError("unknown shape name: " + name);
}

std::string scene_dir(const std::string& root, int id) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "scene_%04d", id);
    return root + "/" + buf;
}

Rng scene_rng(uint64_t seed, int scene_id) {
    return Rng(seed * 1000003ull + static_cast<uint64_t>(scene_id) * 7919ull + 1ull);
}

}  // namespace

SceneRecord generate_scene(const DatasetConfig& config, int scene_id, const KinematicHand& hand) {
    if (config.objects.empty()) throw EmptyInput("generate_scene: no object prototypes");
    if (config.models.empty()) throw EmptyInput("generate_scene: no grasp models");
    Rng rng = scene_rng(config.seed, scene_id);

    SceneRecord scene;
    scene.id = scene_id;
    scene.object = config.objects[scene_id % config.objects.size()];
    scene.physics = draw_physics(scene.object.class_label, rng);
    for (double& p : scene.object.params) p *= scene.physics.scale;
    const double yaw = std::uniform_real_distribution<double>(0, 2 * M_PI)(rng);
    const double jx = std::uniform_real_distribution<double>(-0.02, 0.02)(rng);
    const double jy = std::uniform_real_distribution<double>(-0.02, 0.02)(rng);
    scene.object.pose = Pose(Vec3(jx, jy, scene.object.top_height()),
                             Quat(Eigen::AngleAxisd(yaw, Vec3::UnitZ())));

    // Seed view and object model.
    for (int v = 0; v < config.views; ++v) {
        ViewRecord view;
        view.id = v;
        view.camera = sample_camera_pose(scene.object.com(), config.camera_distance, rng);
        RenderResult render;
        for (int attempt = 0;; ++attempt) {
            try {
                render = render_depth(scene.object, view.camera, config.intrinsics,
                                      scene.physics.depth_noise_sigma, rng);
                break;
            } catch (const TooFewPoints&) {
                if (attempt >= 4) throw;
                view.camera = sample_camera_pose(scene.object.com(), config.camera_distance, rng);
            }
        }
        scene.views.push_back(view);
        scene.view_images.push_back(render.depth);
        if (v == 0) {
            const auto cloud = voxel_downsample(render.cloud, config.voxel);
            const auto features =
                extract_features(cloud, config.feature_radius, view.camera.p);
            const ObjectModel object_model = build_object_model(features, KernelBandwidth{});

            const auto ranked =
                generate_and_rank(config.models, object_model, hand, config.generation, rng);
            const int keep = std::min<int>(config.grasps_per_scene, ranked.size());
            for (int g = 0; g < keep; ++g) {
                GraspRecord rec;
                rec.grasp_type = ranked[g].grasp_type;
                rec.likelihood = ranked[g].log_likelihood;
                rec.collided = ranked[g].collided;
                rec.waypoints = ranked[g].waypoints;
                if (!rec.collided) {
                    // Execute the commanded grasp and store the executed final
                    // waypoint, so a replay judges exactly what was labelled.
                    Waypoint& final = rec.waypoints.back();
                    const ExecutedGrasp ex =
                        execute_grasp(scene.object, hand, final.wrist,
                                      rec.waypoints.front().joints, config.oracle);
                    final.wrist = ex.h_w;
                    final.joints = ex.h_c;
                    const OracleReport report = grasp_outcome_oracle(
                        scene.object, scene.physics, ex.h_w, ex.h_c, hand, config.oracle);
                    rec.success = report.success;
                }
                scene.grasps.push_back(std::move(rec));
            }
        }
    }
    // Associate each grasp with a view, sampled with replacement.
    std::uniform_int_distribution<int> pick(0, config.views - 1);
    for (GraspRecord& g : scene.grasps) g.view_id = pick(rng);
    return scene;
}

DatasetStats compute_stats(const std::vector<SceneRecord>& scenes) {
    DatasetStats s;
    s.scenes = static_cast<int>(scenes.size());
    for (const SceneRecord& scene : scenes) {
        if (scene.grasps.empty()) continue;
        (scene.grasps.front().success ? s.top_success : s.top_failure) += 1;
        for (const GraspRecord& g : scene.grasps)
            (g.success ? s.total_success : s.total_failure) += 1;
    }
    return s;
}

DatasetSplit generate_dataset(const DatasetConfig& config, const KinematicHand& hand,
                              std::vector<SceneRecord>* keep_scenes) {
    std::vector<SceneRecord> scenes(config.scenes);
    const int jobs = std::clamp(config.jobs, 1, std::max(1, config.scenes));
    if (jobs == 1) {
        for (int i = 0; i < config.scenes; ++i) scenes[i] = generate_scene(config, i, hand);
    } else {
        // Scenes draw from independent seeded streams, so parallel generation
        // is bit-identical to sequential.
        std::atomic<int> next{0};
        std::vector<std::thread> workers;
        for (int w = 0; w < jobs; ++w)
            workers.emplace_back([&] {
                for (int i = next++; i < config.scenes; i = next++)
                    scenes[i] = generate_scene(config, i, hand);
            });
        for (std::thread& t : workers) t.join();
    }

    DatasetSplit split;
    split.stats = compute_stats(scenes);

    std::vector<int> eligible;
    for (const SceneRecord& s : scenes) {
        const bool any = std::any_of(s.grasps.begin(), s.grasps.end(),
                                     [](const GraspRecord& g) { return g.success; });
        (any ? eligible : split.excluded).push_back(s.id);
    }
    Rng rng(config.seed ^ 0x5eedULL);
    std::shuffle(eligible.begin(), eligible.end(), rng);
    const int n = static_cast<int>(eligible.size());
    const int n_train = static_cast<int>(std::round(n * config.split_train));
    const int n_val = static_cast<int>(std::round(n * config.split_validation));
    for (int i = 0; i < n; ++i) {
        if (i < n_train)
            split.train.push_back(eligible[i]);
        else if (i < n_train + n_val)
            split.validation.push_back(eligible[i]);
        else
            split.test.push_back(eligible[i]);
    }
    std::sort(split.train.begin(), split.train.end());
    std::sort(split.validation.begin(), split.validation.end());
    std::sort(split.test.begin(), split.test.end());

    if (!config.out_dir.empty()) {
        fs::create_directories(config.out_dir);
        for (const SceneRecord& s : scenes) save_scene(config.out_dir, s, config.intrinsics);
        save_manifest(config.out_dir, config, split);
    }
    if (keep_scenes) *keep_scenes = std::move(scenes);
    return split;
}

void save_scene(const std::string& root, const SceneRecord& scene,
                const CameraIntrinsics& in) {
    const std::string dir = scene_dir(root, scene.id);
    fs::create_directories(dir);

    json j;
    j["id"] = scene.id;
    j["object"] = {{"shape", shape_name(scene.object.shape)},
                   {"class", scene.object.class_label},
                   {"params", scene.object.params},
                   {"pose", pose_to_json(scene.object.pose)}};
    j["physics"] = {{"mass_grams", scene.physics.mass_grams},
                    {"friction", scene.physics.friction},
                    {"scale", scene.physics.scale},
                    {"depth_noise_sigma", scene.physics.depth_noise_sigma}};
    json views = json::array();
    for (const ViewRecord& v : scene.views) {
        views.push_back({{"id", v.id},
                         {"camera", pose_to_json(v.camera)},
                         {"intrinsics",
                          {{"width", in.width},
                           {"height", in.height},
                           {"fx", in.fx},
                           {"fy", in.fy},
                           {"cx", in.cx},
                           {"cy", in.cy}}}});
    }
    j["views"] = views;
    std::ofstream os(dir + "/scene.json");
    if (!os) throw IoError("save_scene: cannot write " + dir);
    os << j.dump(2) << "\n";

    for (size_t v = 0; v < scene.view_images.size(); ++v)
        write_depth(dir + "/view_" + std::to_string(v) + ".depth", scene.view_images[v]);

    std::ofstream gs(dir + "/grasps.jsonl");
    for (const GraspRecord& g : scene.grasps) {
        json row;
        row["type"] = g.grasp_type;
        row["view"] = g.view_id;
        row["likelihood"] = g.likelihood;
        row["collided"] = g.collided;
        row["success"] = g.success;
        json wps = json::array();
        for (const Waypoint& w : g.waypoints) wps.push_back(pack_waypoint(w));
        row["waypoints"] = wps;
        gs << row.dump() << "\n";
    }
}

SceneRecord load_scene(const std::string& dir) {
    std::ifstream is(dir + "/scene.json");
    if (!is) throw IoError("load_scene: cannot open " + dir + "/scene.json");
    const json j = json::parse(is);

    SceneRecord scene;
    scene.id = j.at("id");
    scene.object.shape = shape_from_name(j.at("object").at("shape"));
    scene.object.class_label = j.at("object").at("class");
    scene.object.params = j.at("object").at("params").get<std::vector<double>>();
    scene.object.pose = pose_from_json(j.at("object").at("pose"));
    scene.physics.mass_grams = j.at("physics").at("mass_grams");
    scene.physics.friction = j.at("physics").at("friction");
    scene.physics.scale = j.at("physics").at("scale");
    scene.physics.depth_noise_sigma = j.at("physics").at("depth_noise_sigma");
    for (const json& v : j.at("views")) {
        ViewRecord view;
        view.id = v.at("id");
        view.camera = pose_from_json(v.at("camera"));
        scene.views.push_back(view);
        scene.view_images.push_back(
            read_depth(dir + "/view_" + std::to_string(view.id) + ".depth"));
    }

    std::ifstream gs(dir + "/grasps.jsonl");
    std::string line;
    while (std::getline(gs, line)) {
        if (line.empty()) continue;
        const json row = json::parse(line);
        GraspRecord g;
        g.grasp_type = row.at("type");
        g.view_id = row.at("view");
        g.likelihood = row.at("likelihood");
        g.collided = row.at("collided");
        g.success = row.at("success");
        for (const json& wp : row.at("waypoints"))
            g.waypoints.push_back(unpack_waypoint(wp.get<std::vector<double>>(), kMaxJoints));
        scene.grasps.push_back(std::move(g));
    }
    return scene;
}

void save_manifest(const std::string& root, const DatasetConfig& config,
                   const DatasetSplit& split) {
    json j;
    j["seed"] = config.seed;
    j["scenes"] = config.scenes;
    j["grasps_per_scene"] = config.grasps_per_scene;
    j["views"] = config.views;
    j["splits"] = {{"train", split.train},
                   {"validation", split.validation},
                   {"test", split.test},
                   {"excluded", split.excluded}};
    j["stats"] = {{"scenes", split.stats.scenes},
                  {"top_success", split.stats.top_success},
                  {"top_failure", split.stats.top_failure},
                  {"total_success", split.stats.total_success},
                  {"total_failure", split.stats.total_failure}};
    std::ofstream os(root + "/manifest.json");
    if (!os) throw IoError("save_manifest: cannot write " + root);
    os << j.dump(2) << "\n";
}

DatasetSplit load_manifest(const std::string& root) {
    std::ifstream is(root + "/manifest.json");
    if (!is) throw IoError("load_manifest: cannot open " + root + "/manifest.json");
    const json j = json::parse(is);
    DatasetSplit split;
    split.train = j.at("splits").at("train").get<std::vector<int>>();
    split.validation = j.at("splits").at("validation").get<std::vector<int>>();
    split.test = j.at("splits").at("test").get<std::vector<int>>();
    split.excluded = j.at("splits").at("excluded").get<std::vector<int>>();
    split.stats.scenes = j.at("stats").at("scenes");
    split.stats.top_success = j.at("stats").at("top_success");
    split.stats.top_failure = j.at("stats").at("top_failure");
    split.stats.total_success = j.at("stats").at("total_success");
    split.stats.total_failure = j.at("stats").at("total_failure");
    return split;
}

ReplayResult replay_dataset(const std::string& root, const KinematicHand& hand,
                            const OracleConfig& oracle) {
    ReplayResult result;
    for (const auto& entry : fs::directory_iterator(root)) {
        if (!entry.is_directory()) continue;
        const SceneRecord scene = load_scene(entry.path().string());
        for (const GraspRecord& g : scene.grasps) {
            bool success = false;
            if (!g.collided) {
                const Waypoint& final = g.waypoints.back();
                // Stored joints are zero padded to kMaxJoints; trim to the hand.
                const VecX joints = final.joints.head(hand.dof());
                success = grasp_outcome_oracle(scene.object, scene.physics, final.wrist, joints,
                                               hand, oracle)
                              .success;
            }
            ++result.total;
            if (success == g.success) ++result.matched;
        }
    }
    return result;
}

}  // namespace dexgrasp
