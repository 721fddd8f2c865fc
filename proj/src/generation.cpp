#include "dexgrasp/generation.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <json.hpp>

#include "dexgrasp/errors.hpp"

namespace dexgrasp {

using nlohmann::json;

double poe_objective(const Pose& h_w, const VecX& h_c,
                     const std::vector<QueryDensity>& query_densities,
                     const HandConfigModel& hand_model, const KinematicHand& hand) {
    double ll = hand_model.log_eval(h_c);
    const std::vector<Pose> links = hand.forward_kinematics(h_w, h_c);
    for (const QueryDensity& q : query_densities) ll += q.log_eval(links[q.link_id()]);
    return std::max(ll, kLogFloor);
}

std::vector<Grasp> generate_candidates(const GraspModel& model,
                                       const std::vector<QueryDensity>& query_densities,
                                       int n_seeds, const KinematicHand& hand, Rng& rng) {
    if (n_seeds < 1) throw std::invalid_argument("generate_candidates: n_seeds must be >= 1");
    if (query_densities.empty()) throw EmptyInput("generate_candidates: no query densities");
    std::uniform_int_distribution<size_t> pick(0, query_densities.size() - 1);

    std::vector<Grasp> grasps;
    grasps.reserve(n_seeds);
    for (int i = 0; i < n_seeds; ++i) {
        const QueryDensity& q = query_densities[pick(rng)];
        const Pose s_k = q.sample(rng);
        Grasp g;
        g.h_c = hand.clamp_config(model.hand_config.sample(rng));
        g.h_w = s_k.compose(hand.link_pose_in_wrist(q.link_id(), g.h_c).inverse());
        g.grasp_type = model.grasp_type;
        g.log_likelihood = poe_objective(g.h_w, g.h_c, query_densities, model.hand_config, hand);
        grasps.push_back(std::move(g));
    }
    return grasps;
}

Grasp improve_grasp(const Grasp& grasp, const Objective& objective, int steps,
                    const GenerationConfig& config, Rng& rng) {
    Grasp best = grasp;
    for (int s = 0; s < steps; ++s) {
        // Body-frame proposals commute with rigid transforms of the scene.
        Pose h_w = best.h_w;
        h_w.p += h_w.q * random_gaussian3(config.step_pos, rng);
        h_w.q = (h_w.q * random_rotation_perturbation(config.step_rot, rng)).normalized();
        VecX h_c = best.h_c;
        std::normal_distribution<double> n(0.0, config.step_joint);
        for (int i = 0; i < h_c.size(); ++i) h_c[i] += n(rng);

        const double ll = objective(h_w, h_c);
        if (ll > best.log_likelihood) {
            best.h_w = h_w;
            best.h_c = h_c;
            best.log_likelihood = ll;
        }
    }
    return best;
}

bool hand_collides_table(const KinematicHand& hand, const Pose& h_w, const VecX& h_c,
                         double table_z) {
    const std::vector<Pose> links = hand.forward_kinematics(h_w, h_c);
    for (int i = 0; i < hand.num_links(); ++i) {
        Vec3 a, b;
        hand.link_segment(i, links[i], a, b);
        const double radius = hand.link_geometry(i).radius;
        if (std::min(a.z(), b.z()) - radius < table_z) return true;
    }
    return false;
}

GraspTrajectory synthesize_trajectory(const Grasp& grasp, const GraspModel& model,
                                      const KinematicHand& hand, const GenerationConfig& config) {
    GraspTrajectory traj;
    traj.grasp_type = grasp.grasp_type;
    traj.log_likelihood = grasp.log_likelihood;
    traj.collided = grasp.collided;

    const Vec3 approach = grasp.h_w.q * Vec3::UnitZ();
    Pose pre = grasp.h_w;
    pre.p -= config.retreat * approach;
    const VecX open_delta = model.hand_config.start_config() - model.hand_config.grip_config();

    for (int i = 0; i < kTrajectoryWaypoints; ++i) {
        const double t = static_cast<double>(i) / (kTrajectoryWaypoints - 1);
        const double gamma = 1.0 - t;  // 1 at the pre-pose, 0 at the grasp
        Waypoint w;
        w.wrist.p = (1.0 - t) * pre.p + t * grasp.h_w.p;
        w.wrist.q = pre.q.slerp(t, grasp.h_w.q);
        w.joints = hand.clamp_config(grasp.h_c + gamma * open_delta);
        traj.waypoints.push_back(std::move(w));
    }
    return traj;
}

void sort_ranked(std::vector<GraspTrajectory>& trajectories) {
    std::stable_sort(trajectories.begin(), trajectories.end(),
                     [](const GraspTrajectory& a, const GraspTrajectory& b) {
                         if (a.collided != b.collided) return !a.collided;
                         return a.log_likelihood > b.log_likelihood;
                     });
}

std::vector<GraspTrajectory> generate_and_rank(const std::vector<GraspModel>& models,
                                               const ObjectModel& novel,
                                               const KinematicHand& hand,
                                               const GenerationConfig& config, Rng& rng) {
    if (models.empty()) throw EmptyInput("generate_and_rank: no grasp models");

    std::vector<GraspTrajectory> all;
    for (const GraspModel& model : models) {
        TransferOptions topt;
        topt.kq = config.kq;
        const QueryDensityBatch batch = query_density_batch(model, novel, topt, rng);

        std::vector<Grasp> candidates =
            generate_candidates(model, batch.densities, config.n_seeds, hand, rng);
        const Objective objective = [&](const Pose& h_w, const VecX& h_c) {
            return poe_objective(h_w, h_c, batch.densities, model.hand_config, hand);
        };

        int done = 0;
        while (done < config.improve_steps) {
            const int chunk = std::min(config.prune_interval, config.improve_steps - done);
            for (Grasp& g : candidates) g = improve_grasp(g, objective, chunk, config, rng);
            done += chunk;
            if (done < config.improve_steps && candidates.size() > 1) {
                std::stable_sort(candidates.begin(), candidates.end(),
                                 [](const Grasp& a, const Grasp& b) {
                                     return a.log_likelihood > b.log_likelihood;
                                 });
                const size_t keep = std::max<size_t>(
                    1, static_cast<size_t>(std::ceil(candidates.size() * config.prune_keep)));
                candidates.resize(keep);
            }
        }

        for (Grasp& g : candidates) {
            if (g.log_likelihood <= kLogFloor) continue;
            if (config.check_table)
                g.collided = hand_collides_table(hand, g.h_w, g.h_c, config.table_z);
            all.push_back(synthesize_trajectory(g, model, hand, config));
        }
    }
    if (all.empty()) throw NoCandidates("generate_and_rank: every candidate objective floored");
    sort_ranked(all);
    return all;
}

std::vector<double> pack_waypoint(const Waypoint& w) {
    std::vector<double> out(kWaypointFloats, 0.0);
    out[0] = w.wrist.p.x();
    out[1] = w.wrist.p.y();
    out[2] = w.wrist.p.z();
    out[3] = w.wrist.q.w();
    out[4] = w.wrist.q.x();
    out[5] = w.wrist.q.y();
    out[6] = w.wrist.q.z();
    const int dof = std::min<int>(static_cast<int>(w.joints.size()), kMaxJoints);
    for (int i = 0; i < dof; ++i) out[7 + i] = w.joints[i];
    return out;
}

Waypoint unpack_waypoint(const std::vector<double>& v, int dof) {
    if (static_cast<int>(v.size()) != kWaypointFloats)
        throw DimensionMismatch("unpack_waypoint: expected 27 values");
    Waypoint w;
    w.wrist.p = Vec3(v[0], v[1], v[2]);
    w.wrist.q = Quat(v[3], v[4], v[5], v[6]).normalized();
    w.joints = VecX::Zero(dof);
    for (int i = 0; i < dof && i < kMaxJoints; ++i) w.joints[i] = v[7 + i];
    return w;
}

void write_grasps_jsonl(const std::string& path, const std::vector<GraspTrajectory>& grasps) {
    std::ofstream os(path);
    if (!os) throw IoError("write_grasps_jsonl: cannot open " + path);
    for (const GraspTrajectory& g : grasps) {
        json row;
        row["type"] = g.grasp_type;
        row["likelihood"] = g.log_likelihood;
        row["collided"] = g.collided;
        json wps = json::array();
        for (const Waypoint& w : g.waypoints) wps.push_back(pack_waypoint(w));
        row["waypoints"] = wps;
        os << row.dump() << "\n";
    }
}

std::vector<GraspTrajectory> read_grasps_jsonl(const std::string& path, int dof) {
    std::ifstream is(path);
    if (!is) throw IoError("read_grasps_jsonl: cannot open " + path);
    std::vector<GraspTrajectory> out;
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        const json row = json::parse(line);
        GraspTrajectory g;
        g.grasp_type = row.at("type");
        g.log_likelihood = row.at("likelihood");
        g.collided = row.at("collided");
        for (const json& wp : row.at("waypoints"))
            g.waypoints.push_back(unpack_waypoint(wp.get<std::vector<double>>(), dof));
        out.push_back(std::move(g));
    }
    return out;
}

}  // namespace dexgrasp
