#pragma once

#include <string>
#include <vector>

#include "dexgrasp/generation.hpp"
#include "dexgrasp/oracle.hpp"
#include "dexgrasp/render.hpp"

namespace dexgrasp {

struct ViewRecord {
    int id = 0;
    Pose camera;
};

struct GraspRecord {
    int grasp_type = 1;
    int view_id = 0;
    double likelihood = 0;
    bool collided = false;
    bool success = false;
    std::vector<Waypoint> waypoints;  // world frame
};

struct SceneRecord {
    int id = 0;
    AnalyticObject object;
    PhysicsDraw physics;
    std::vector<ViewRecord> views;
    std::vector<DepthImage> view_images;  // aligned with views
    std::vector<GraspRecord> grasps;      // rank order
};

struct DatasetStats {
    int scenes = 0;
    int top_success = 0, top_failure = 0;
    int total_success = 0, total_failure = 0;
};

struct DatasetSplit {
    std::vector<int> train, validation, test;
    std::vector<int> excluded;  // scenes without a single success
    DatasetStats stats;
};

struct DatasetConfig {
    std::vector<AnalyticObject> objects;  // prototypes, cycled per scene
    std::vector<GraspModel> models;
    int scenes = 10;
    int grasps_per_scene = 20;
    int views = 4;  // total, including the seed view
    int jobs = 1;   // scene-generation workers; results independent of the count
    uint64_t seed = 0;
    std::string out_dir;  // empty: keep in memory only
    GenerationConfig generation;
    OracleConfig oracle;
    CameraIntrinsics intrinsics;
    double camera_distance = 0.5;
    double voxel = 0.004;
    double feature_radius = 0.008;
    double split_train = 0.8, split_validation = 0.1, split_test = 0.1;
};

/// One scene of the §V-B style workflow: draw physics, render a seed view,
/// transfer + generate + rank grasps, label each with the oracle, render
/// further views, and associate each grasp with a view.
SceneRecord generate_scene(const DatasetConfig& config, int scene_id, const KinematicHand& hand);

/// Full dataset; scenes written under out_dir when set. Scenes with zero
/// successes are excluded from every split.
DatasetSplit generate_dataset(const DatasetConfig& config, const KinematicHand& hand,
                              std::vector<SceneRecord>* keep_scenes = nullptr);

void save_scene(const std::string& root, const SceneRecord& scene,
                const CameraIntrinsics& intrinsics);
SceneRecord load_scene(const std::string& scene_dir);

void save_manifest(const std::string& root, const DatasetConfig& config,
                   const DatasetSplit& split);
DatasetSplit load_manifest(const std::string& root);

/// Recompute every stored label with the oracle; counts exact matches.
struct ReplayResult {
    int total = 0;
    int matched = 0;
};
ReplayResult replay_dataset(const std::string& root, const KinematicHand& hand,
                            const OracleConfig& oracle = {});

/// Statistics recomputed from scene records (manifest must agree).
DatasetStats compute_stats(const std::vector<SceneRecord>& scenes);

}  // namespace dexgrasp
