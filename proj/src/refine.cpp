#include "dexgrasp/em/refine.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "dexgrasp/errors.hpp"

namespace dexgrasp::em {

std::vector<double> TrajectoryScorer::gradient(const std::vector<double>&) {
    throw EmptyInput("TrajectoryScorer: gradient not provided by this scorer");
}

double NetScorer::score(const std::vector<double>& encoding) {
    return net_.forward(image_, encoding)(0);
}

std::vector<double> NetScorer::gradient(const std::vector<double>& encoding) {
    return net_.trajectory_gradient(image_, encoding);
}

namespace {

GraspTrajectory decoded(const GraspTrajectory& original, const std::vector<double>& encoding,
                        const Pose& camera) {
    GraspTrajectory out = original;
    out.waypoints =
        decode_trajectory(encoding, camera, static_cast<int>(original.waypoints[0].joints.size()));
    return out;
}

}  // namespace

RefineResult refine_ga(const GraspTrajectory& grasp, TrajectoryScorer& scorer, const Pose& camera,
                       const RefineConfig& config) {
    const int dof = static_cast<int>(grasp.waypoints[0].joints.size());
    const bool move_position =
        config.method == RefineMethod::GA1 || config.method == RefineMethod::GA3;
    const bool move_joints =
        config.method == RefineMethod::GA2 || config.method == RefineMethod::GA3;

    std::vector<double> current = encode_trajectory(grasp.waypoints, camera, grasp.grasp_type);
    RefineResult result;
    result.initial_score = scorer.score(current);
    result.best_score = result.initial_score;
    result.evaluations = 1;
    std::vector<double> best = current;

    for (int it = 0; it < config.ga_iterations; ++it) {
        const std::vector<double> g = scorer.gradient(current);
        if (move_position) {
            // One shared delta: the average position gradient over the waypoints.
            double d[3] = {0, 0, 0};
            for (int s = 0; s < kWaypoints; ++s)
                for (int k = 0; k < 3; ++k) d[k] += g[s * kWaypointFloats + k];
            for (int k = 0; k < 3; ++k) d[k] *= config.lr_position / kWaypoints;
            for (int s = 0; s < kWaypoints; ++s)
                for (int k = 0; k < 3; ++k) current[s * kWaypointFloats + k] += d[k];
        }
        if (move_joints) {
            for (int s = 0; s < kWaypoints; ++s)
                for (int j = 0; j < dof; ++j) {
                    const int at = s * kWaypointFloats + 7 + j;
                    current[at] += config.lr_joints * g[at];
                }
        }
        const double p = scorer.score(current);
        ++result.evaluations;
        if (p > result.best_score) {
            result.best_score = p;
            best = current;
        }
    }
    result.grasp = decoded(grasp, best, camera);
    return result;
}

RefineResult refine_ga(const GraspTrajectory& grasp, EvalNet& net, const Tensor& image,
                       const Pose& camera, const RefineConfig& config) {
    NetScorer scorer(net, image);
    return refine_ga(grasp, scorer, camera, config);
}

namespace {

std::vector<Waypoint> perturb(const std::vector<Waypoint>& current, const RefineConfig& config,
                              Rng& rng) {
    const bool move_position =
        config.method == RefineMethod::SA1 || config.method == RefineMethod::SA3;
    const bool scale_joints =
        config.method == RefineMethod::SA2 || config.method == RefineMethod::SA3;
    std::vector<Waypoint> out = current;
    if (move_position) {
        std::normal_distribution<double> g(0.0, config.sa_position_sigma);
        const Vec3 delta(g(rng), g(rng), g(rng));
        for (Waypoint& w : out) w.wrist.p += delta;
    }
    if (scale_joints) {
        std::normal_distribution<double> g(1.0, config.sa_joint_scale_sigma);
        const double scale = g(rng);
        const VecX first = current.front().joints;
        const VecX last = current.back().joints * scale;
        const int n = static_cast<int>(out.size());
        for (int i = 0; i < n; ++i) {
            const double t = n > 1 ? static_cast<double>(i) / (n - 1) : 1.0;
            out[i].joints = first + t * (last - first);
        }
    }
    return out;
}

}  // namespace

RefineResult refine_sa(const GraspTrajectory& grasp, TrajectoryScorer& scorer, const Pose& camera,
                       const RefineConfig& config, const CollisionCheck& collides, Rng& rng) {
    std::vector<Waypoint> current = grasp.waypoints;
    RefineResult result;
    double current_p = scorer.score(encode_trajectory(current, camera, grasp.grasp_type));
    result.initial_score = current_p;
    result.best_score = current_p;
    result.evaluations = 1;
    std::vector<Waypoint> best = current;

    std::uniform_real_distribution<double> u(0.0, 1.0);
    int stalled = 0;
    for (int it = 0; it < config.sa_iterations; ++it) {
        const double temperature = config.sa_t0 * std::pow(0.5, it);
        bool improved = false;
        for (int k = 0; k < config.sa_perturbations; ++k) {
            const std::vector<Waypoint> candidate = perturb(current, config, rng);
            if (collides && collides(candidate)) continue;
            const double p =
                scorer.score(encode_trajectory(candidate, camera, grasp.grasp_type));
            ++result.evaluations;
            const bool accept =
                p >= current_p || u(rng) < std::exp(-(current_p - p) / temperature);
            if (accept) {
                current = candidate;
                current_p = p;
                ++result.accepted;
            }
            if (p > result.best_score) {
                result.best_score = p;
                best = candidate;
                improved = true;
            }
        }
        if (improved)
            stalled = 0;
        else if (++stalled >= config.sa_stall_limit)
            break;
    }
    result.grasp = grasp;
    result.grasp.waypoints = best;
    return result;
}

RefineResult refine_sa(const GraspTrajectory& grasp, EvalNet& net, const Tensor& image,
                       const Pose& camera, const RefineConfig& config,
                       const CollisionCheck& collides, Rng& rng) {
    NetScorer scorer(net, image);
    return refine_sa(grasp, scorer, camera, config, collides, rng);
}

namespace {

void sort_scored(std::vector<ScoredGrasp>& grasps,
                 const std::function<double(const ScoredGrasp&)>& score) {
    std::stable_sort(grasps.begin(), grasps.end(),
                     [&](const ScoredGrasp& a, const ScoredGrasp& b) {
                         if (a.trajectory.collided != b.trajectory.collided)
                             return !a.trajectory.collided;
                         return score(a) > score(b);
                     });
}

}  // namespace

RankedResult rank_by(std::vector<ScoredGrasp> grasps, RankSource source) {
    if (source == RankSource::Optimal)
        sort_scored(grasps, [](const ScoredGrasp& g) { return g.success ? 1.0 : 0.0; });
    else if (source == RankSource::GM)
        sort_scored(grasps, [](const ScoredGrasp& g) { return g.gm_likelihood; });
    else
        sort_scored(grasps, [](const ScoredGrasp& g) { return g.em_probability; });
    return RankedResult{std::move(grasps), source};
}

RankedResult rerank(std::vector<ScoredGrasp> grasps, TrajectoryScorer& scorer,
                    const Pose& camera) {
    for (ScoredGrasp& g : grasps)
        g.em_probability = scorer.score(
            encode_trajectory(g.trajectory.waypoints, camera, g.trajectory.grasp_type));
    return rank_by(std::move(grasps), RankSource::EM);
}

RankedResult rerank(std::vector<ScoredGrasp> grasps, EvalNet& net, const Tensor& image,
                    const Pose& camera) {
    NetScorer scorer(net, image);
    return rerank(std::move(grasps), scorer, camera);
}

RankCurves success_vs_rank(const std::vector<RankedResult>& results, int max_rank) {
    if (results.empty()) throw EmptyInput("success_vs_rank: no results");
    RankCurves curves;
    for (int r = 0; r < max_rank; ++r) {
        int n = 0, ranked_succ = 0, optimal_succ = 0;
        for (const RankedResult& scene : results) {
            if (r >= static_cast<int>(scene.grasps.size())) continue;
            ++n;
            if (scene.grasps[r].success) ++ranked_succ;
            int total = 0;
            for (const ScoredGrasp& g : scene.grasps) total += g.success ? 1 : 0;
            if (total > r) ++optimal_succ;  // r-th grasp of the outcome-sorted scene
        }
        curves.ranked.push_back(n == 0 ? 0.0 : static_cast<double>(ranked_succ) / n);
        curves.optimal.push_back(n == 0 ? 0.0 : static_cast<double>(optimal_succ) / n);
    }
    return curves;
}

void write_rank_curve_csv(const std::string& path, const RankCurves& curves) {
    std::ofstream os(path);
    if (!os) throw IoError("write_rank_curve_csv: cannot write " + path);
    os << "rank,success_rate,optimal\n";
    for (size_t r = 0; r < curves.ranked.size(); ++r)
        os << r + 1 << "," << curves.ranked[r] << "," << curves.optimal[r] << "\n";
}

}  // namespace dexgrasp::em
