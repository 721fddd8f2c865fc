#include "dexgrasp/hand.hpp"

#include <cmath>

#include "dexgrasp/errors.hpp"

namespace dexgrasp {

KinematicHand::KinematicHand(const Config& cfg) : cfg_(cfg) {
    if (static_cast<int>(cfg_.finger_angles.size()) != cfg_.fingers)
        throw DimensionMismatch("KinematicHand: finger_angles size != fingers");
    if (static_cast<int>(cfg_.link_lengths.size()) != cfg_.joints_per_finger)
        throw DimensionMismatch("KinematicHand: link_lengths size != joints_per_finger");
    for (int f = 0; f < cfg_.fingers; ++f) {
        const double phi = cfg_.finger_angles[f];
        const Vec3 radial(std::cos(phi), std::sin(phi), 0.0);
        Mat3 frame;
        frame.col(0) = Vec3::UnitZ();       // finger +x: along the approach axis
        frame.col(2) = -radial;             // finger +z: inward
        frame.col(1) = frame.col(2).cross(frame.col(0));
        finger_bases_.emplace_back(cfg_.base_radius * radial, Quat(frame));
    }
}

CapsuleLink KinematicHand::link_geometry(int link) const {
    const int j = link % cfg_.joints_per_finger;
    return CapsuleLink{cfg_.link_radius, cfg_.link_lengths[j]};
}

VecX KinematicHand::clamp_config(const VecX& h_c, bool* clamped) const {
    VecX out = h_c;
    bool moved = false;
    for (int i = 0; i < out.size(); ++i) {
        const double c = std::clamp(out[i], cfg_.joint_lo, cfg_.joint_hi);
        if (c != out[i]) moved = true;
        out[i] = c;
    }
    if (clamped) *clamped = moved;
    return out;
}

std::vector<Pose> KinematicHand::forward_kinematics(const Pose& h_w, const VecX& h_c) const {
    if (h_c.size() != dof()) throw DimensionMismatch("forward_kinematics: |h_c| != D");
    const VecX q = clamp_config(h_c);
    std::vector<Pose> links;
    links.reserve(num_links());
    for (int f = 0; f < cfg_.fingers; ++f) {
        Pose p = h_w.compose(finger_bases_[f]);
        for (int j = 0; j < cfg_.joints_per_finger; ++j) {
            const double theta = q[f * cfg_.joints_per_finger + j];
            p = p.compose(Pose(Vec3::Zero(), Quat(Eigen::AngleAxisd(-theta, Vec3::UnitY()))));
            links.push_back(p);
            p = p.compose(Pose(Vec3(cfg_.link_lengths[j], 0, 0), Quat::Identity()));
        }
    }
    return links;
}

Pose KinematicHand::link_pose_in_wrist(int link, const VecX& h_c) const {
    return forward_kinematics(Pose::identity(), h_c)[link];
}

MatX KinematicHand::position_jacobian(const Pose& h_w, const VecX& h_c) const {
    if (h_c.size() != dof()) throw DimensionMismatch("position_jacobian: |h_c| != D");
    const VecX q = clamp_config(h_c);
    MatX jac = MatX::Zero(3 * num_links(), dof());
    for (int f = 0; f < cfg_.fingers; ++f) {
        // Joint origins and world axes along the chain.
        std::vector<Vec3> joint_origin(cfg_.joints_per_finger);
        std::vector<Vec3> joint_axis(cfg_.joints_per_finger);
        std::vector<Vec3> link_origin(cfg_.joints_per_finger);
        Pose p = h_w.compose(finger_bases_[f]);
        for (int j = 0; j < cfg_.joints_per_finger; ++j) {
            joint_origin[j] = p.p;
            joint_axis[j] = p.q * Vec3(0, -1, 0);
            p = p.compose(Pose(Vec3::Zero(), Quat(Eigen::AngleAxisd(-q[f * cfg_.joints_per_finger + j], Vec3::UnitY()))));
            link_origin[j] = p.p;
            p = p.compose(Pose(Vec3(cfg_.link_lengths[j], 0, 0), Quat::Identity()));
        }
        for (int j = 0; j < cfg_.joints_per_finger; ++j) {
            const int link = f * cfg_.joints_per_finger + j;
            for (int k = 0; k <= j; ++k) {
                const Vec3 col = joint_axis[k].cross(link_origin[j] - joint_origin[k]);
                jac.block<3, 1>(3 * link, f * cfg_.joints_per_finger + k) = col;
            }
        }
    }
    return jac;
}

void KinematicHand::link_segment(int link, const Pose& link_pose, Vec3& a, Vec3& b) const {
    const CapsuleLink geo = link_geometry(link);
    a = link_pose.p;
    b = link_pose.apply(Vec3(geo.length, 0, 0));
}

}  // namespace dexgrasp
