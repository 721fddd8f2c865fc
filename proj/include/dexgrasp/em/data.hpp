#pragma once

#include "dexgrasp/dataset.hpp"
#include "dexgrasp/em/refine.hpp"
#include "dexgrasp/em/train.hpp"

namespace dexgrasp::em {

/// Training samples of one scene: one colourised image per view, shared by
/// every grasp attached to that view.
std::vector<Sample> scene_samples(const SceneRecord& scene, const CameraIntrinsics& intrinsics,
                                  const ColouriseConfig& config = {});

/// Samples of a dataset split loaded from disk.
std::vector<Sample> load_split_samples(const std::string& root, const std::vector<int>& scene_ids,
                                       const CameraIntrinsics& intrinsics,
                                       const ColouriseConfig& config = {});

/// Ranking inputs of one scene, evaluated against the seed view.
struct SceneEval {
    std::vector<ScoredGrasp> grasps;  // input order = stored GM rank order
    std::shared_ptr<Tensor> image;    // colourised seed view
    Pose camera;                      // seed-view camera pose
};

SceneEval scene_eval_inputs(const SceneRecord& scene, const CameraIntrinsics& intrinsics,
                            const ColouriseConfig& config = {});

}  // namespace dexgrasp::em
