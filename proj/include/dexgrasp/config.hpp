#pragma once

#include <string>

#include "dexgrasp/dataset.hpp"
#include "dexgrasp/em/refine.hpp"
#include "dexgrasp/em/train.hpp"
#include "dexgrasp/grasp_model.hpp"

namespace dexgrasp {

/// Scalar dataset parameters (objects and models are supplied separately).
struct DatasetParams {
    int scenes = 10;
    int grasps_per_scene = 20;
    int views = 4;
    double camera_distance = 0.5;
    double voxel = 0.004;
    double feature_radius = 0.008;
    double split_train = 0.8, split_validation = 0.1, split_test = 0.1;
};

/// One declarative file covering every pipeline stage; flag overrides win.
struct PipelineConfig {
    uint64_t seed = 0;
    LearnParams learn;
    int kq = 500;  // kernels per query density
    GenerationConfig generation;
    OracleConfig oracle;
    DatasetParams dataset;
    em::EvalNetConfig net;
    em::TrainConfig train;
    em::RefineConfig refine;
};

PipelineConfig load_pipeline_config(const std::string& path);
void save_pipeline_config(const std::string& path, const PipelineConfig& config);

/// JSON round trip used by the file I/O and the hash.
std::string pipeline_config_json(const PipelineConfig& config);
PipelineConfig parse_pipeline_config(const std::string& json_text);

/// FNV-1a over the canonical JSON form, as a hex string; recorded in run
/// manifests so outputs can be traced back to their exact configuration.
std::string config_hash(const PipelineConfig& config);

/// Populates DatasetConfig from the scalar blocks.
DatasetConfig make_dataset_config(const PipelineConfig& config,
                                  std::vector<AnalyticObject> objects,
                                  std::vector<GraspModel> models, const std::string& out_dir);

/// Writes {command, seed, config_hash} next to a command's outputs.
void write_run_manifest(const std::string& dir, const std::string& command,
                        const PipelineConfig& config);

}  // namespace dexgrasp
