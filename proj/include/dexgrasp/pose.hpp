#pragma once

#include <Eigen/Dense>
#include <Eigen/Geometry>
#include <random>

namespace dexgrasp {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Vec4 = Eigen::Vector4d;
using VecX = Eigen::VectorXd;
using Mat3 = Eigen::Matrix3d;
using MatX = Eigen::MatrixXd;
using Quat = Eigen::Quaterniond;

using Rng = std::mt19937_64;

/// Rigid transform: position p and unit quaternion q.
struct Pose {
    Vec3 p = Vec3::Zero();
    Quat q = Quat::Identity();

    Pose() = default;
    Pose(const Vec3& p_, const Quat& q_) : p(p_), q(q_.normalized()) {}

    static Pose identity() { return Pose(); }

    /// this ∘ other: apply `other` in the frame of `this`.
    Pose compose(const Pose& other) const {
        return Pose(p + q * other.p, q * other.q);
    }

    Pose inverse() const {
        Quat qi = q.conjugate();
        return Pose(qi * (-p), qi);
    }

    Vec3 apply(const Vec3& x) const { return p + q * x; }
};

/// Canonical quaternion sign: w > 0, ties broken on x, y, z.
Quat canonical(const Quat& q);

/// Geodesic angle between two orientations, double cover handled. Radians.
double orientation_angle(const Quat& a, const Quat& b);

/// Uniform random rotation (Shoemake).
Quat random_rotation(Rng& rng);

/// Small random rotation: axis uniform on S^2, angle ~ |N(0, sigma)|.
Quat random_rotation_perturbation(double sigma, Rng& rng);

Vec3 random_gaussian3(double sigma, Rng& rng);

/// Deterministic orthonormal completion: unit vectors spanning the plane
/// orthogonal to n (|n| = 1).
void tangent_basis(const Vec3& n, Vec3& t1, Vec3& t2);

}  // namespace dexgrasp
