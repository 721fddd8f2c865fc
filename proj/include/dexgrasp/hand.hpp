#pragma once

#include <vector>

#include "dexgrasp/pose.hpp"

namespace dexgrasp {

/// Capsule from the link-frame origin to (length, 0, 0), with the given radius.
struct CapsuleLink {
    double radius = 0.008;
    double length = 0.05;
};

/// Parametric capsule-link hand: F fingers x J revolute joints.
///
/// Conventions: finger links extend along the link-frame +x axis; a positive
/// joint angle rotates the link from +x toward +z (about the local -y axis).
/// Finger frames are attached to the wrist with +x along the wrist approach
/// axis (+z of the wrist frame) and +z pointing at the hand axis, so closing
/// the joints curls the fingers inward.
class KinematicHand {
public:
    struct Config {
        int fingers = 3;
        int joints_per_finger = 3;
        std::vector<double> link_lengths = {0.05, 0.035, 0.025};  // per joint along a finger
        double link_radius = 0.008;
        double base_radius = 0.04;
        std::vector<double> finger_angles = {0.0, M_PI, M_PI / 2};  // placement around the axis
        double joint_lo = -0.3;
        double joint_hi = 2.0;
    };

    KinematicHand() : KinematicHand(Config{}) {}
    explicit KinematicHand(const Config& cfg);

    int dof() const { return cfg_.fingers * cfg_.joints_per_finger; }
    int num_links() const { return dof(); }
    int fingers() const { return cfg_.fingers; }
    int joints_per_finger() const { return cfg_.joints_per_finger; }
    const Config& config() const { return cfg_; }

    CapsuleLink link_geometry(int link) const;
    int fingertip_link(int finger) const { return finger * cfg_.joints_per_finger + cfg_.joints_per_finger - 1; }

    /// Joint vector clamped into limits. Sets `clamped` when any entry moved.
    VecX clamp_config(const VecX& h_c, bool* clamped = nullptr) const;

    /// World pose of every link (finger-major order). Throws DimensionMismatch.
    std::vector<Pose> forward_kinematics(const Pose& h_w, const VecX& h_c) const;

    /// Link pose expressed in the wrist frame.
    Pose link_pose_in_wrist(int link, const VecX& h_c) const;

    /// Analytic Jacobian of all link origin positions w.r.t. the joints:
    /// (3 * num_links) x D.
    MatX position_jacobian(const Pose& h_w, const VecX& h_c) const;

    /// Capsule segment of a link in world coordinates given its pose.
    void link_segment(int link, const Pose& link_pose, Vec3& a, Vec3& b) const;

private:
    Config cfg_;
    std::vector<Pose> finger_bases_;  // in the wrist frame
};

}  // namespace dexgrasp
