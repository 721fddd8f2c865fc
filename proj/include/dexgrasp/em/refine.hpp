#pragma once

#include <functional>

#include "dexgrasp/em/encode.hpp"

namespace dexgrasp::em {

enum class RefineMethod { GA1, GA2, GA3, SA1, SA2, SA3 };

struct RefineConfig {
    RefineMethod method = RefineMethod::GA3;
    // Gradient ascent on the trajectory inputs.
    int ga_iterations = 50;
    double lr_position = 0.001;
    double lr_joints = 0.01;
    // Simulated annealing.
    int sa_iterations = 5;
    int sa_perturbations = 20;
    double sa_t0 = 0.2;       // halved every iteration
    int sa_stall_limit = 3;   // stop after this many non-improving iterations
    double sa_position_sigma = 0.001;     // meters, shared 3D move
    double sa_joint_scale_sigma = 0.001;  // scale ~ N(1, sigma) on final joints
};

/// Predicted-success scorer over the 280-float trajectory encoding. The
/// gradient is only needed by the GA variants.
class TrajectoryScorer {
public:
    virtual ~TrajectoryScorer() = default;
    virtual double score(const std::vector<double>& encoding) = 0;
    virtual std::vector<double> gradient(const std::vector<double>& encoding);
};

/// Scorer backed by an evaluation network and a fixed scene image.
class NetScorer : public TrajectoryScorer {
public:
    NetScorer(EvalNet& net, const Tensor& image) : net_(net), image_(image) {}
    double score(const std::vector<double>& encoding) override;
    std::vector<double> gradient(const std::vector<double>& encoding) override;

private:
    EvalNet& net_;
    const Tensor& image_;
};

struct RefineResult {
    GraspTrajectory grasp;
    double initial_score = 0;
    double best_score = 0;
    int evaluations = 0;
    int accepted = 0;  // SA only: Metropolis-accepted candidates
};

/// Gradient ascent on the encoded trajectory (GA1: one shared position delta
/// averaged over the waypoints; GA2: per-joint deltas; GA3: both). Returns the
/// best-scoring trajectory encountered, never worse than the input.
RefineResult refine_ga(const GraspTrajectory& grasp, TrajectoryScorer& scorer, const Pose& camera,
                       const RefineConfig& config);
RefineResult refine_ga(const GraspTrajectory& grasp, EvalNet& net, const Tensor& image,
                       const Pose& camera, const RefineConfig& config);

/// True when a proposed trajectory must be rejected without evaluation.
using CollisionCheck = std::function<bool(const std::vector<Waypoint>&)>;

/// Metropolis annealing over trajectory perturbations (SA1: shared 3D position
/// move; SA2: final-joint scaling with linear re-interpolation of the
/// intermediate waypoints; SA3: both, drawn independently). Colliding
/// perturbations are rejected before evaluation; returns the best-so-far.
RefineResult refine_sa(const GraspTrajectory& grasp, TrajectoryScorer& scorer, const Pose& camera,
                       const RefineConfig& config, const CollisionCheck& collides, Rng& rng);
RefineResult refine_sa(const GraspTrajectory& grasp, EvalNet& net, const Tensor& image,
                       const Pose& camera, const RefineConfig& config,
                       const CollisionCheck& collides, Rng& rng);

/// One grasp of a scene with all three scores attached.
struct ScoredGrasp {
    GraspTrajectory trajectory;
    double gm_likelihood = 0;
    double em_probability = 0;
    bool success = false;  // ground-truth outcome
};

enum class RankSource { GM, EM, Optimal };

struct RankedResult {
    std::vector<ScoredGrasp> grasps;  // descending by the source score
    RankSource source = RankSource::GM;
};

/// Stable sort by the source's score (GM likelihood or true outcome),
/// collided grasps last.
RankedResult rank_by(std::vector<ScoredGrasp> grasps, RankSource source);

/// Scores every grasp with the net and sorts by predicted success descending
/// (stable, collided last).
RankedResult rerank(std::vector<ScoredGrasp> grasps, EvalNet& net, const Tensor& image,
                    const Pose& camera);
RankedResult rerank(std::vector<ScoredGrasp> grasps, TrajectoryScorer& scorer,
                    const Pose& camera);

struct RankCurves {
    std::vector<double> ranked;   // rank r -> fraction of scenes whose r-th grasp succeeded
    std::vector<double> optimal;  // same scenes re-sorted by true outcome
};

RankCurves success_vs_rank(const std::vector<RankedResult>& results, int max_rank);

void write_rank_curve_csv(const std::string& path, const RankCurves& curves);

}  // namespace dexgrasp::em
