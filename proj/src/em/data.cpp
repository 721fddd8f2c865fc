#include "dexgrasp/em/data.hpp"

#include <filesystem>
#include <map>

namespace dexgrasp::em {

namespace {

std::map<int, std::shared_ptr<Tensor>> colourised_views(const SceneRecord& scene,
                                                        const CameraIntrinsics& intrinsics,
                                                        const ColouriseConfig& config) {
    std::map<int, std::shared_ptr<Tensor>> images;
    for (size_t i = 0; i < scene.views.size(); ++i)
        images[scene.views[i].id] =
            std::make_shared<Tensor>(colourise(scene.view_images[i], intrinsics, config));
    return images;
}

const ViewRecord& view_by_id(const SceneRecord& scene, int id) {
    for (const ViewRecord& v : scene.views)
        if (v.id == id) return v;
    return scene.views.front();
}

}  // namespace

std::vector<Sample> scene_samples(const SceneRecord& scene, const CameraIntrinsics& intrinsics,
                                  const ColouriseConfig& config) {
    const auto images = colourised_views(scene, intrinsics, config);
    std::vector<Sample> samples;
    for (const GraspRecord& g : scene.grasps) {
        Sample s;
        s.image = images.at(g.view_id);
        s.trajectory =
            encode_trajectory(g.waypoints, view_by_id(scene, g.view_id).camera, g.grasp_type);
        s.label = g.success ? 1 : 0;
        samples.push_back(std::move(s));
    }
    return samples;
}

std::vector<Sample> load_split_samples(const std::string& root, const std::vector<int>& scene_ids,
                                       const CameraIntrinsics& intrinsics,
                                       const ColouriseConfig& config) {
    std::vector<Sample> out;
    for (int id : scene_ids) {
        char name[32];
        std::snprintf(name, sizeof(name), "scene_%04d", id);
        const SceneRecord scene = load_scene((std::filesystem::path(root) / name).string());
        auto samples = scene_samples(scene, intrinsics, config);
        out.insert(out.end(), std::make_move_iterator(samples.begin()),
                   std::make_move_iterator(samples.end()));
    }
    return out;
}

SceneEval scene_eval_inputs(const SceneRecord& scene, const CameraIntrinsics& intrinsics,
                            const ColouriseConfig& config) {
    SceneEval eval;
    eval.camera = scene.views.front().camera;
    eval.image = std::make_shared<Tensor>(colourise(scene.view_images.front(), intrinsics, config));
    for (const GraspRecord& g : scene.grasps) {
        ScoredGrasp s;
        s.trajectory.waypoints = g.waypoints;
        s.trajectory.grasp_type = g.grasp_type;
        s.trajectory.log_likelihood = g.likelihood;
        s.trajectory.collided = g.collided;
        s.gm_likelihood = g.likelihood;
        s.success = g.success;
        eval.grasps.push_back(std::move(s));
    }
    return eval;
}

}  // namespace dexgrasp::em
