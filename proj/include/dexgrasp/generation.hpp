#pragma once

#include <functional>
#include <string>
#include <vector>

#include "dexgrasp/query_density.hpp"

namespace dexgrasp {

/// A complete grasp: wrist pose, joint configuration, and its log product-of-
/// experts objective value.
struct Grasp {
    Pose h_w;
    VecX h_c;
    int grasp_type = 1;
    double log_likelihood = 0;
    bool collided = false;
};

struct Waypoint {
    Pose wrist;
    VecX joints;
};

/// Ten-waypoint approach-and-close trajectory; the last waypoint is the grasp.
struct GraspTrajectory {
    std::vector<Waypoint> waypoints;
    int grasp_type = 1;
    double log_likelihood = 0;
    bool collided = false;

    const Waypoint& final_waypoint() const { return waypoints.back(); }
};

constexpr int kTrajectoryWaypoints = 10;
constexpr double kLogFloor = -745.0;

struct GenerationConfig {
    int n_seeds = 100;
    int improve_steps = 100;
    int prune_interval = 20;
    double prune_keep = 0.5;
    double step_pos = 0.002;    // meters
    double step_rot = 0.02;     // radians
    double step_joint = 0.02;   // radians
    int kq = 500;
    bool check_table = true;
    double table_z = 0.0;
    double retreat = 0.1;       // pre-pose offset along the approach axis
};

/// log C(h_c) + sum_i log Q_i(k_i^for(h_w, h_c)), floored at kLogFloor.
double poe_objective(const Pose& h_w, const VecX& h_c,
                     const std::vector<QueryDensity>& query_densities,
                     const HandConfigModel& hand_model, const KinematicHand& hand);

std::vector<Grasp> generate_candidates(const GraspModel& model,
                                       const std::vector<QueryDensity>& query_densities,
                                       int n_seeds, const KinematicHand& hand, Rng& rng);

using Objective = std::function<double(const Pose&, const VecX&)>;

/// Stochastic hill climbing; only improving steps are accepted, so the
/// returned objective is >= the input objective.
Grasp improve_grasp(const Grasp& grasp, const Objective& objective, int steps,
                    const GenerationConfig& config, Rng& rng);

bool hand_collides_table(const KinematicHand& hand, const Pose& h_w, const VecX& h_c,
                         double table_z);

GraspTrajectory synthesize_trajectory(const Grasp& grasp, const GraspModel& model,
                                      const KinematicHand& hand, const GenerationConfig& config);

/// Full generation: per grasp model, seed candidates from the query densities,
/// hill-climb with periodic pruning, then rank everything by log likelihood
/// (collided grasps last).
std::vector<GraspTrajectory> generate_and_rank(const std::vector<GraspModel>& models,
                                               const ObjectModel& novel,
                                               const KinematicHand& hand,
                                               const GenerationConfig& config, Rng& rng);

/// Stable likelihood-descending order with collided grasps forced last.
void sort_ranked(std::vector<GraspTrajectory>& trajectories);

/// JSON-lines persistence: {type, likelihood, collided, waypoints[10][27]}.
void write_grasps_jsonl(const std::string& path, const std::vector<GraspTrajectory>& grasps);
std::vector<GraspTrajectory> read_grasps_jsonl(const std::string& path, int dof = 20);

/// Per-waypoint packing: 3 position + 4 quaternion + 20 joints (zero padded).
std::vector<double> pack_waypoint(const Waypoint& w);
Waypoint unpack_waypoint(const std::vector<double>& values, int dof);

constexpr int kWaypointFloats = 27;
constexpr int kMaxJoints = 20;

}  // namespace dexgrasp
