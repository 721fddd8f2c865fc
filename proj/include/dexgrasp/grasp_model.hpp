#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dexgrasp/contact_model.hpp"
#include "dexgrasp/hand_config.hpp"

namespace dexgrasp {

/// One demonstrated grasp: the sensed features of the scene, the closing
/// joint trajectory, and the final hand pose.
struct DemoGrasp {
    std::vector<SurfaceFeature> features;
    std::vector<VecX> joint_trajectory;
    Pose final_wrist;
    VecX final_config;
    int grasp_type = 1;
};

struct LearnParams {
    double lambda = 100.0;
    double delta = 0.01;
    double alpha = 10.0;
    double beta = 1.2;
    double sigma_hc = 0.05;
    int gamma_grid = 10;
    KernelBandwidth bandwidth;
};

struct GraspModel {
    int grasp_type = 1;            // 1..10
    int view_id = -1;              // >= 0 for per-view (GM2) models
    std::vector<ContactModel> contacts;
    HandConfigModel hand_config;
};

GraspModel learn_grasp_model(const DemoGrasp& demo, const KinematicHand& hand,
                             const LearnParams& params);

struct ContactModelCluster {
    std::vector<int> member_ids;
    int exemplar_id = -1;
    ContactModel prototype;
};

struct ClusterOptions {
    double damping = 0.9;
    int max_iterations = 500;
    std::optional<double> preference;  // default: median similarity
    int distance_samples = 1000;
    size_t prototype_budget = 200;
};

struct ClusterReport {
    bool converged = false;
    int iterations = 0;
};

/// Affinity propagation on similarity = -contact_model_distance, with
/// prototypes condensed from the union of member kernels.
std::vector<ContactModelCluster> cluster_contact_models(const std::vector<ContactModel>& models,
                                                        const ClusterOptions& options, Rng& rng,
                                                        ClusterReport* report = nullptr);

/// Bundle persistence: a directory with manifest.json and one KDE binary per
/// contact model.
void save_grasp_model(const GraspModel& model, const std::string& dir);
GraspModel load_grasp_model(const std::string& dir);

}  // namespace dexgrasp
