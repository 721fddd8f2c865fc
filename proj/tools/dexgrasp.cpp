#include <atomic>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "dexgrasp/config.hpp"
#include "dexgrasp/demos.hpp"
#include "dexgrasp/em/data.hpp"
#include "dexgrasp/errors.hpp"
#include "dexgrasp/features.hpp"
#include "dexgrasp/ply.hpp"
#include "dexgrasp/stats.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace dexgrasp;

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Global {
    std::string config_path;
    uint64_t seed = 0;
    bool seed_set = false;
    int jobs = static_cast<int>(std::thread::hardware_concurrency());

    PipelineConfig load() const {
        PipelineConfig cfg =
            config_path.empty() ? PipelineConfig{} : load_pipeline_config(config_path);
        if (seed_set) cfg.seed = seed;
        return cfg;
    }
};

void parallel_for(int n, int jobs, const std::function<void(int)>& body) {
    jobs = std::clamp(jobs, 1, std::max(1, n));
    if (jobs == 1) {
        for (int i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> workers;
    for (int w = 0; w < jobs; ++w)
        workers.emplace_back([&] {
            for (int i = next++; i < n; i = next++) body(i);
        });
    for (std::thread& t : workers) t.join();
}

em::EvalNet clone_net(const em::EvalNet& net) {
    em::EvalNet copy(net.config());
    copy.restore_params(net.snapshot_params());
    return copy;
}

std::vector<AnalyticObject> parse_objects(const std::string& csv) {
    if (csv == "standard") return standard_objects();
    std::vector<AnalyticObject> out;
    const auto all = standard_objects();
    const std::vector<std::string> names = {"sphere", "box", "cylinder", "cup", "mug"};
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        const auto it = std::find(names.begin(), names.end(), item);
        if (it == names.end()) throw UsageError("unknown object: " + item);
        out.push_back(all[it - names.begin()]);
    }
    return out;
}

std::vector<GraspModel> load_model_bundles(const std::string& dir) {
    std::vector<GraspModel> models;
    std::vector<fs::path> dirs;
    for (const auto& entry : fs::directory_iterator(dir)) {
        const std::string name = entry.path().filename().string();
        if (entry.is_directory() && name.rfind("gm_", 0) == 0 &&
            name.find("_view_") == std::string::npos)
            dirs.push_back(entry.path());
    }
    std::sort(dirs.begin(), dirs.end());
    for (const fs::path& p : dirs) models.push_back(load_grasp_model(p.string()));
    if (models.empty()) throw UsageError("no grasp-model bundles under " + dir);
    return models;
}

std::vector<GraspModel> learn_demo_models(const PipelineConfig& cfg, const KinematicHand& hand) {
    std::vector<GraspModel> models;
    for (int t = 1; t <= 10; ++t) {
        const auto type = static_cast<DemoType>(t);
        const ScriptedDemo demo = scripted_demo(demo_object(type), type, hand);
        GraspModel model = learn_grasp_model(demo.demo, hand, cfg.learn);
        model.grasp_type = t;
        models.push_back(std::move(model));
    }
    return models;
}

ObjectModel object_model_from_cloud(const std::string& ply_path, const PipelineConfig& cfg) {
    const std::vector<Vec3> cloud = read_ply(ply_path);
    const auto features = extract_features(voxel_downsample(cloud, cfg.dataset.voxel),
                                           cfg.dataset.feature_radius);
    return build_object_model(features, cfg.learn.bandwidth);
}

void print_stats(const DatasetStats& s) {
    const int top = s.top_success + s.top_failure;
    const int total = s.total_success + s.total_failure;
    std::cout << "scenes " << s.scenes << "\n"
              << "top-grasp success " << s.top_success << " failure " << s.top_failure << " ("
              << (top ? 100.0 * s.top_success / top : 0.0) << "%)\n"
              << "total success " << s.total_success << " failure " << s.total_failure << " ("
              << (total ? 100.0 * s.total_success / total : 0.0) << "%)\n";
}

int cmd_demo_learn(const Global& g, const std::string& out, bool gm2, int views) {
    const PipelineConfig cfg = g.load();
    const KinematicHand hand;
    const CameraIntrinsics intrinsics;
    fs::create_directories(out);
    int bundles = 0, view_models = 0;
    for (int t = 1; t <= 10; ++t) {
        const auto type = static_cast<DemoType>(t);
        const AnalyticObject object = demo_object(type);
        const ScriptedDemo demo = scripted_demo(object, type, hand);
        const std::string base = out + "/gm_" + std::to_string(t);
        if (!gm2) {
            GraspModel model = learn_grasp_model(demo.demo, hand, cfg.learn);
            model.grasp_type = t;
            save_grasp_model(model, base);
            ++bundles;
            continue;
        }
        std::vector<GraspModel> per_view;
        for (int v = 0; v < views; ++v) {
            const Pose camera = camera_pose_at(object.pose.p, 0.45, 45 * M_PI / 180,
                                               2 * M_PI * v / views);
            Rng rng(cfg.seed + static_cast<uint64_t>(t) * 100 + v);
            const RenderResult render = render_depth(object, camera, intrinsics, 0.0, rng);
            DemoGrasp view_demo = demo.demo;
            try {
                view_demo.features =
                    extract_features(voxel_downsample(render.cloud, cfg.dataset.voxel),
                                     cfg.dataset.feature_radius, camera.p);
                GraspModel model = learn_grasp_model(view_demo, hand, cfg.learn);
                model.grasp_type = t;
                model.view_id = v;
                save_grasp_model(model, base + "_view_" + std::to_string(v));
                per_view.push_back(std::move(model));
                ++view_models;
            } catch (const NoContact&) {
                std::cerr << "demo-learn: type " << t << " view " << v
                          << " sees no contact region, skipped\n";
            }
        }
        if (per_view.empty()) throw NoContact("no view yielded a model for type " + std::to_string(t));

        // Clustered bundle: affinity propagation over each link's per-view
        // contact models; cluster prototypes become the contacts.
        GraspModel clustered = per_view.front();
        clustered.view_id = -1;
        clustered.contacts.clear();
        std::vector<int> links;
        for (const GraspModel& m : per_view)
            for (const ContactModel& c : m.contacts)
                if (std::find(links.begin(), links.end(), c.link_id) == links.end())
                    links.push_back(c.link_id);
        std::sort(links.begin(), links.end());
        Rng cluster_rng(cfg.seed + static_cast<uint64_t>(t) * 977);
        for (int link : links) {
            std::vector<ContactModel> members;
            for (const GraspModel& m : per_view)
                for (const ContactModel& c : m.contacts)
                    if (c.link_id == link) members.push_back(c);
            if (members.size() < 2) {
                clustered.contacts.push_back(members.front());
                continue;
            }
            const auto clusters = cluster_contact_models(members, ClusterOptions{}, cluster_rng);
            for (const ContactModelCluster& c : clusters)
                clustered.contacts.push_back(c.prototype);
        }
        save_grasp_model(clustered, base);
        ++bundles;
    }
    if (gm2)
        std::cout << "learned " << view_models << " view models, " << bundles
                  << " clustered bundles\n";
    else
        std::cout << "learned " << bundles << " grasp-model bundles\n";
    write_run_manifest(out, "demo-learn", cfg);
    return 0;
}

int cmd_dataset(const Global& g, std::string out, int scenes, int grasps, int views,
                const std::string& objects_csv, const std::string& models_dir,
                const std::string& replay_dir) {
    PipelineConfig cfg = g.load();
    const KinematicHand hand;
    if (!replay_dir.empty()) {
        const ReplayResult r = replay_dataset(replay_dir, hand, cfg.oracle);
        std::cout << "replayed " << r.total << " grasps, " << r.matched << " labels matched\n";
        return r.matched == r.total ? 0 : 1;
    }
    if (out.empty()) throw UsageError("dataset: --out is required");
    const std::vector<AnalyticObject> objects = parse_objects(objects_csv);
    if (objects.empty()) throw UsageError("dataset: empty object list");
    if (scenes > 0) cfg.dataset.scenes = scenes;
    if (grasps > 0) cfg.dataset.grasps_per_scene = grasps;
    if (views > 0) cfg.dataset.views = views;
    const std::vector<GraspModel> models =
        models_dir.empty() ? learn_demo_models(cfg, hand) : load_model_bundles(models_dir);
    DatasetConfig dc = make_dataset_config(cfg, objects, models, out);
    dc.jobs = g.jobs;
    const DatasetSplit split = generate_dataset(dc, hand);
    print_stats(split.stats);
    std::cout << "splits train/validation/test/excluded: " << split.train.size() << "/"
              << split.validation.size() << "/" << split.test.size() << "/"
              << split.excluded.size() << "\n";
    write_run_manifest(out, "dataset", cfg);
    return 0;
}

int cmd_transfer(const Global& g, const std::string& model_dir, const std::string& cloud_path,
                 const std::string& out) {
    const PipelineConfig cfg = g.load();
    const GraspModel model = load_grasp_model(model_dir);
    const ObjectModel novel = object_model_from_cloud(cloud_path, cfg);
    Rng rng(cfg.seed);
    TransferOptions options;
    options.kq = cfg.kq;
    const QueryDensityBatch batch = query_density_batch(model, novel, options, rng);
    json j = json::array();
    for (const QueryDensity& q : batch.densities) {
        json kernels = json::array();
        for (const auto& k : q.kernels())
            kernels.push_back({{"p", {k.mean.p.x(), k.mean.p.y(), k.mean.p.z()}},
                               {"q", {k.mean.q.w(), k.mean.q.x(), k.mean.q.y(), k.mean.q.z()}},
                               {"w", k.weight}});
        j.push_back({{"link", q.link_id()}, {"kernels", std::move(kernels)}});
    }
    std::ofstream os(out);
    if (!os) throw IoError("transfer: cannot write " + out);
    os << j.dump(2) << "\n";
    std::cout << batch.densities.size() << " query densities in " << batch.wall_seconds << " s\n";
    return 0;
}

int cmd_generate(const Global& g, const std::string& models_dir, const std::string& cloud_path,
                 const std::string& out, int top) {
    const PipelineConfig cfg = g.load();
    const KinematicHand hand;
    const std::vector<GraspModel> models = load_model_bundles(models_dir);
    const ObjectModel novel = object_model_from_cloud(cloud_path, cfg);
    Rng rng(cfg.seed);
    std::vector<GraspTrajectory> grasps =
        generate_and_rank(models, novel, hand, cfg.generation, rng);
    if (top > 0 && static_cast<int>(grasps.size()) > top) grasps.resize(top);
    write_grasps_jsonl(out, grasps);
    std::cout << "wrote " << grasps.size() << " ranked grasps\n";
    return 0;
}

int cmd_em_train(const Global& g, const std::string& data, const std::string& out,
                 const std::string& curve_csv) {
    const PipelineConfig cfg = g.load();
    const CameraIntrinsics intrinsics;
    const DatasetSplit split = load_manifest(data);
    const auto train_set = em::load_split_samples(data, split.train, intrinsics);
    const auto val_set = em::load_split_samples(data, split.validation, intrinsics);
    em::EvalNet net(cfg.net);
    Rng rng(cfg.seed);
    const em::TrainResult result = em::train(net, train_set, val_set, cfg.train, rng);
    net.save(out);
    if (!curve_csv.empty()) em::write_curve_csv(curve_csv, result.curve);
    std::cout << "best epoch " << result.best_epoch << " validation loss "
              << result.best_val_loss << "\n";
    return 0;
}

int cmd_em_eval(const Global& g, const std::string& data, const std::string& ckpt,
                double threshold, const std::string& split_name) {
    const PipelineConfig cfg = g.load();
    (void)cfg;
    if (!fs::exists(ckpt)) throw UsageError("em eval: checkpoint not found: " + ckpt);
    em::EvalNet net = em::EvalNet::load(ckpt);
    const CameraIntrinsics intrinsics;
    const DatasetSplit split = load_manifest(data);
    const std::vector<int>& ids = split_name == "train"        ? split.train
                                  : split_name == "validation" ? split.validation
                                                               : split.test;
    const auto samples = em::load_split_samples(data, ids, intrinsics);
    if (samples.empty()) throw UsageError("em eval: split '" + split_name + "' is empty");
    em::Metrics m;
    for (const em::Sample& s : samples) {
        const bool predicted = net.forward(*s.image, s.trajectory)(0) > threshold;
        if (s.label == 1)
            (predicted ? m.tp : m.fn) += 1;
        else
            (predicted ? m.fp : m.tn) += 1;
    }
    std::cout << "samples " << samples.size() << " tp " << m.tp << " fp " << m.fp << " tn "
              << m.tn << " fn " << m.fn << "\n"
              << "accuracy " << m.accuracy() << " f1 " << m.f1() << "\n";
    return 0;
}

int cmd_refine(const Global& g, const std::string& grasps_path, const std::string& ckpt,
               const std::string& scene_dir, const std::string& out) {
    const PipelineConfig cfg = g.load();
    if (!fs::exists(ckpt)) throw UsageError("refine: checkpoint not found: " + ckpt);
    const em::EvalNet net = em::EvalNet::load(ckpt);
    const KinematicHand hand;
    const CameraIntrinsics intrinsics;
    const SceneRecord scene = load_scene(scene_dir);
    const em::Tensor image = em::colourise(scene.view_images.front(), intrinsics);
    const Pose camera = scene.views.front().camera;
    std::vector<GraspTrajectory> grasps = read_grasps_jsonl(grasps_path, hand.dof());

    const bool annealing = cfg.refine.method == em::RefineMethod::SA1 ||
                           cfg.refine.method == em::RefineMethod::SA2 ||
                           cfg.refine.method == em::RefineMethod::SA3;
    const em::CollisionCheck collides = [&](const std::vector<Waypoint>& wps) {
        return hand_collides_table(hand, wps.back().wrist, wps.back().joints,
                                   cfg.generation.table_z);
    };
    std::vector<double> before(grasps.size()), after(grasps.size());
    parallel_for(static_cast<int>(grasps.size()), g.jobs, [&](int i) {
        em::EvalNet worker = clone_net(net);
        em::RefineResult r;
        if (annealing) {
            Rng rng(cfg.seed + static_cast<uint64_t>(i) * 31337 + 7);
            r = em::refine_sa(grasps[i], worker, image, camera, cfg.refine, collides, rng);
        } else {
            r = em::refine_ga(grasps[i], worker, image, camera, cfg.refine);
        }
        before[i] = r.initial_score;
        after[i] = r.best_score;
        grasps[i] = r.grasp;
    });
    write_grasps_jsonl(out, grasps);
    double b = 0, a = 0;
    for (size_t i = 0; i < grasps.size(); ++i) {
        b += before[i];
        a += after[i];
    }
    const double n = std::max<size_t>(1, grasps.size());
    std::cout << "refined " << grasps.size() << " grasps, mean predicted success " << b / n
              << " -> " << a / n << "\n";
    return 0;
}

int cmd_stats_fisher(long long a, long long b, long long c, long long d) {
    std::cout << "p = " << fisher_exact({{{a, b}, {c, d}}}) << "\n";
    return 0;
}

int cmd_stats_mcnemar(long long b, long long c) {
    std::cout << "p = " << mcnemar(b, c) << "\n";
    return 0;
}

struct VariantReport {
    std::string name;
    int success = 0, failure = 0;
    double mean_pred_before = 0, mean_pred_after = 0;  // refinement variants
};

int cmd_pipeline(const Global& g, const std::string& out, int scenes, int grasps,
                 const std::string& variants_csv) {
    PipelineConfig cfg = g.load();
    if (scenes > 0) cfg.dataset.scenes = scenes;
    if (grasps > 0) cfg.dataset.grasps_per_scene = grasps;
    std::vector<std::string> variants;
    {
        std::stringstream ss(variants_csv);
        std::string item;
        while (std::getline(ss, item, ','))
            if (!item.empty()) variants.push_back(item);
    }
    if (variants.empty() || variants.front() != "gm")
        throw UsageError("pipeline: --variants must start with the gm baseline");

    const KinematicHand hand;
    const CameraIntrinsics intrinsics;
    fs::create_directories(out);

    std::cout << "[1/4] learning demonstration models\n";
    const std::vector<GraspModel> models = learn_demo_models(cfg, hand);

    std::cout << "[2/4] generating dataset (" << cfg.dataset.scenes << " scenes)\n";
    DatasetConfig dc = make_dataset_config(cfg, standard_objects(), models, out + "/dataset");
    dc.jobs = g.jobs;
    std::vector<SceneRecord> all_scenes;
    const DatasetSplit split = generate_dataset(dc, hand, &all_scenes);
    print_stats(split.stats);
    auto scenes_by_id = [&](const std::vector<int>& ids) {
        std::vector<const SceneRecord*> out_scenes;
        for (int id : ids) out_scenes.push_back(&all_scenes[id]);
        return out_scenes;
    };

    const bool needs_net = variants.size() > 1;
    em::EvalNet net(cfg.net);
    if (needs_net) {
        std::cout << "[3/4] training the evaluation network\n";
        std::vector<em::Sample> train_set, val_set;
        for (const SceneRecord* s : scenes_by_id(split.train)) {
            auto samples = em::scene_samples(*s, intrinsics);
            train_set.insert(train_set.end(), samples.begin(), samples.end());
        }
        for (const SceneRecord* s : scenes_by_id(split.validation)) {
            auto samples = em::scene_samples(*s, intrinsics);
            val_set.insert(val_set.end(), samples.begin(), samples.end());
        }
        Rng rng(cfg.seed);
        const em::TrainResult result = em::train(net, train_set, val_set, cfg.train, rng);
        net.save(out + "/em.ckpt");
        em::write_curve_csv(out + "/curve.csv", result.curve);
        std::cout << "best epoch " << result.best_epoch << " validation loss "
                  << result.best_val_loss << "\n";
    }

    std::cout << "[4/4] evaluating variants on the test split\n";
    const auto test_scenes = scenes_by_id(split.test);
    if (test_scenes.empty()) throw EmptySplit("pipeline: test split is empty");

    std::vector<em::RankedResult> gm_ranked, em_ranked;
    std::vector<em::SceneEval> evals(test_scenes.size());
    parallel_for(static_cast<int>(test_scenes.size()), g.jobs, [&](int i) {
        evals[i] = em::scene_eval_inputs(*test_scenes[i], intrinsics);
    });
    for (auto& e : evals) gm_ranked.push_back(em::rank_by(e.grasps, em::RankSource::GM));
    if (needs_net) {
        em_ranked.resize(evals.size());
        parallel_for(static_cast<int>(evals.size()), g.jobs, [&](int i) {
            em::EvalNet worker = clone_net(net);
            em_ranked[i] = em::rerank(evals[i].grasps, worker, *evals[i].image, evals[i].camera);
        });
    }

    std::vector<VariantReport> reports;
    for (const std::string& variant : variants) {
        VariantReport report;
        report.name = variant;
        if (variant == "gm") {
            for (const auto& r : gm_ranked)
                (r.grasps.front().success ? report.success : report.failure) += 1;
        } else if (variant == "em") {
            for (const auto& r : em_ranked)
                (r.grasps.front().success ? report.success : report.failure) += 1;
        } else if (variant == "ga" || variant == "sa") {
            PipelineConfig rcfg = cfg;
            rcfg.refine.method =
                variant == "ga" ? em::RefineMethod::GA3 : em::RefineMethod::SA3;
            std::vector<int> succ(evals.size(), 0);
            std::vector<double> pred_before(evals.size()), pred_after(evals.size());
            parallel_for(static_cast<int>(evals.size()), g.jobs, [&](int i) {
                em::EvalNet worker = clone_net(net);
                const em::ScoredGrasp& top = em_ranked[i].grasps.front();
                const em::CollisionCheck collides = [&](const std::vector<Waypoint>& wps) {
                    return hand_collides_table(hand, wps.back().wrist, wps.back().joints,
                                               cfg.generation.table_z);
                };
                em::RefineResult r;
                if (variant == "ga") {
                    r = em::refine_ga(top.trajectory, worker, *evals[i].image, evals[i].camera,
                                      rcfg.refine);
                } else {
                    Rng rng(cfg.seed + static_cast<uint64_t>(i) * 1299709 + 3);
                    r = em::refine_sa(top.trajectory, worker, *evals[i].image, evals[i].camera,
                                      rcfg.refine, collides, rng);
                }
                pred_before[i] = r.initial_score;
                pred_after[i] = r.best_score;
                const Waypoint& final = r.grasp.final_waypoint();
                const SceneRecord& scene = *test_scenes[i];
                const ExecutedGrasp ex =
                    execute_grasp(scene.object, hand, final.wrist,
                                  VecX(r.grasp.waypoints.front().joints.head(hand.dof())),
                                  cfg.oracle);
                const OracleReport verdict = grasp_outcome_oracle(scene.object, scene.physics,
                                                                  ex.h_w, ex.h_c, hand, cfg.oracle);
                succ[i] = verdict.success && !r.grasp.collided ? 1 : 0;
            });
            for (size_t i = 0; i < evals.size(); ++i) {
                (succ[i] ? report.success : report.failure) += 1;
                report.mean_pred_before += pred_before[i] / evals.size();
                report.mean_pred_after += pred_after[i] / evals.size();
            }
        } else {
            throw UsageError("pipeline: unknown variant " + variant);
        }
        reports.push_back(report);
    }

    // Comparison table in the style of the simulation-results reporting:
    // success %, fails relative to the baseline, Fisher significance.
    const VariantReport& baseline = reports.front();
    std::ofstream os(out + "/report.csv");
    if (!os) throw IoError("pipeline: cannot write report.csv");
    os << "variant,success,failure,success_pct,fails_pct_of_baseline,fisher_p,"
          "mean_pred_before,mean_pred_after\n";
    for (const VariantReport& r : reports) {
        const int n = r.success + r.failure;
        const double pct = n ? 100.0 * r.success / n : 0.0;
        const double fails_pct =
            baseline.failure ? 100.0 * r.failure / baseline.failure : 0.0;
        const double p = fisher_exact({{{r.success, r.failure},
                                        {baseline.success, baseline.failure}}});
        os << r.name << "," << r.success << "," << r.failure << "," << pct << "," << fails_pct
           << "," << p << "," << r.mean_pred_before << "," << r.mean_pred_after << "\n";
        std::cout << r.name << ": " << pct << "% top-1 success (" << r.success << "/" << n
                  << "), fails = " << fails_pct << "% of baseline fails\n";
    }

    em::write_rank_curve_csv(out + "/rank_gm.csv",
                             em::success_vs_rank(gm_ranked, cfg.dataset.grasps_per_scene));
    if (!em_ranked.empty())
        em::write_rank_curve_csv(out + "/rank_em.csv",
                                 em::success_vs_rank(em_ranked, cfg.dataset.grasps_per_scene));
    write_run_manifest(out, "pipeline", cfg);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Generative-evaluative dexterous grasping pipeline"};
    app.require_subcommand(1);

    Global global;
    app.add_option("--config", global.config_path, "pipeline config JSON");
    app.add_option("--seed", global.seed, "override the config seed")
        ->each([&](const std::string&) { global.seed_set = true; });
    app.add_option("--jobs", global.jobs, "worker threads (scenes, refinement)");

    std::function<int()> action;

    {
        auto* cmd = app.add_subcommand("demo-learn", "learn grasp models from scripted demos");
        auto out = std::make_shared<std::string>("models");
        auto gm2 = std::make_shared<bool>(false);
        auto views = std::make_shared<int>(7);
        cmd->add_option("--out", *out, "output bundle directory");
        cmd->add_flag("--gm2", *gm2, "per-view models plus clustering");
        cmd->add_option("--views", *views, "viewpoints per demo (GM2)");
        cmd->callback([&, out, gm2, views] {
            action = [&, out, gm2, views] { return cmd_demo_learn(global, *out, *gm2, *views); };
        });
    }
    {
        auto* cmd = app.add_subcommand("dataset", "generate or replay a labelled grasp dataset");
        auto out = std::make_shared<std::string>();
        auto scenes = std::make_shared<int>(0);
        auto grasps = std::make_shared<int>(0);
        auto views = std::make_shared<int>(0);
        auto objects = std::make_shared<std::string>("standard");
        auto models = std::make_shared<std::string>();
        auto replay = std::make_shared<std::string>();
        cmd->add_option("--out", *out, "output dataset directory");
        cmd->add_option("--scenes", *scenes, "scene count");
        cmd->add_option("--grasps", *grasps, "grasps per scene");
        cmd->add_option("--views", *views, "views per scene");
        cmd->add_option("--objects", *objects, "comma list (sphere,box,cylinder,cup,mug)");
        cmd->add_option("--models", *models, "grasp-model bundle directory");
        cmd->add_option("--replay", *replay, "re-evaluate the labels of an existing dataset");
        cmd->callback([&, out, scenes, grasps, views, objects, models, replay] {
            action = [&, out, scenes, grasps, views, objects, models, replay] {
                return cmd_dataset(global, *out, *scenes, *grasps, *views, *objects, *models,
                                   *replay);
            };
        });
    }
    {
        auto* cmd = app.add_subcommand("transfer", "query densities for a novel cloud");
        auto model = std::make_shared<std::string>();
        auto cloud = std::make_shared<std::string>();
        auto out = std::make_shared<std::string>("query_densities.json");
        cmd->add_option("--model", *model, "grasp-model bundle")->required();
        cmd->add_option("--cloud", *cloud, "novel point cloud (PLY)")->required();
        cmd->add_option("--out", *out, "output JSON");
        cmd->callback([&, model, cloud, out] {
            action = [&, model, cloud, out] { return cmd_transfer(global, *model, *cloud, *out); };
        });
    }
    {
        auto* cmd = app.add_subcommand("generate", "generate and rank grasps on a novel cloud");
        auto models = std::make_shared<std::string>();
        auto cloud = std::make_shared<std::string>();
        auto out = std::make_shared<std::string>("grasps.jsonl");
        auto top = std::make_shared<int>(0);
        cmd->add_option("--models", *models, "bundle directory")->required();
        cmd->add_option("--cloud", *cloud, "novel point cloud (PLY)")->required();
        cmd->add_option("--out", *out, "output JSON-lines");
        cmd->add_option("--top", *top, "keep only the best N");
        cmd->callback([&, models, cloud, out, top] {
            action = [&, models, cloud, out, top] {
                return cmd_generate(global, *models, *cloud, *out, *top);
            };
        });
    }
    {
        auto* cmd = app.add_subcommand("em", "evaluation-network training and metrics");
        cmd->require_subcommand(1);
        auto* tr = cmd->add_subcommand("train", "train on a dataset directory");
        auto data = std::make_shared<std::string>();
        auto out = std::make_shared<std::string>("em.ckpt");
        auto curve = std::make_shared<std::string>();
        tr->add_option("--data", *data, "dataset directory")->required();
        tr->add_option("--out", *out, "checkpoint path");
        tr->add_option("--curve", *curve, "training-curve CSV");
        tr->callback([&, data, out, curve] {
            action = [&, data, out, curve] { return cmd_em_train(global, *data, *out, *curve); };
        });
        auto* ev = cmd->add_subcommand("eval", "metrics on a dataset split");
        auto edata = std::make_shared<std::string>();
        auto ckpt = std::make_shared<std::string>("em.ckpt");
        auto threshold = std::make_shared<double>(0.5);
        auto split = std::make_shared<std::string>("test");
        ev->add_option("--data", *edata, "dataset directory")->required();
        ev->add_option("--ckpt", *ckpt, "checkpoint path");
        ev->add_option("--threshold", *threshold, "decision threshold");
        ev->add_option("--split", *split, "train|validation|test");
        ev->callback([&, edata, ckpt, threshold, split] {
            action = [&, edata, ckpt, threshold, split] {
                return cmd_em_eval(global, *edata, *ckpt, *threshold, *split);
            };
        });
    }
    {
        auto* cmd = app.add_subcommand("refine", "refine ranked grasps against a checkpoint");
        auto grasps = std::make_shared<std::string>();
        auto ckpt = std::make_shared<std::string>();
        auto scene = std::make_shared<std::string>();
        auto out = std::make_shared<std::string>("refined.jsonl");
        cmd->add_option("--grasps", *grasps, "input JSON-lines")->required();
        cmd->add_option("--ckpt", *ckpt, "checkpoint path")->required();
        cmd->add_option("--scene", *scene, "scene directory (image + camera)")->required();
        cmd->add_option("--out", *out, "output JSON-lines");
        cmd->callback([&, grasps, ckpt, scene, out] {
            action = [&, grasps, ckpt, scene, out] {
                return cmd_refine(global, *grasps, *ckpt, *scene, *out);
            };
        });
    }
    {
        auto* cmd = app.add_subcommand("pipeline", "end-to-end run with a variant comparison");
        auto out = std::make_shared<std::string>("pipeline_out");
        auto scenes = std::make_shared<int>(0);
        auto grasps = std::make_shared<int>(0);
        auto variants = std::make_shared<std::string>("gm,em");
        cmd->add_option("--out", *out, "output directory");
        cmd->add_option("--scenes", *scenes, "scene count override");
        cmd->add_option("--grasps", *grasps, "grasps per scene override");
        cmd->add_option("--variants", *variants, "comma list of gm,em,ga,sa (gm first)");
        cmd->callback([&, out, scenes, grasps, variants] {
            action = [&, out, scenes, grasps, variants] {
                return cmd_pipeline(global, *out, *scenes, *grasps, *variants);
            };
        });
    }
    {
        auto* cmd = app.add_subcommand("stats", "exact statistical tests");
        cmd->require_subcommand(1);
        auto* fi = cmd->add_subcommand("fisher", "two-sided Fisher's exact test on a 2x2 table");
        auto counts = std::make_shared<std::vector<long long>>();
        fi->add_option("counts", *counts, "a b c d")->expected(4);
        fi->callback([&, counts] {
            action = [&, counts] {
                return cmd_stats_fisher((*counts)[0], (*counts)[1], (*counts)[2], (*counts)[3]);
            };
        });
        auto* mc = cmd->add_subcommand("mcnemar", "exact McNemar test on discordant counts");
        auto pair = std::make_shared<std::vector<long long>>();
        mc->add_option("counts", *pair, "b c")->expected(2);
        mc->callback([&, pair] {
            action = [&, pair] { return cmd_stats_mcnemar((*pair)[0], (*pair)[1]); };
        });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        return action ? action() : 2;
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
