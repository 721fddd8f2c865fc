#include "dexgrasp/pose.hpp"

#include <cmath>

namespace dexgrasp {

Quat canonical(const Quat& q) {
    const double c[4] = {q.w(), q.x(), q.y(), q.z()};
    for (double v : c) {
        if (v > 0) return q;
        if (v < 0) return Quat(-q.w(), -q.x(), -q.y(), -q.z());
    }
    return q;
}

double orientation_angle(const Quat& a, const Quat& b) {
    double d = std::abs(a.dot(b));
    d = std::min(1.0, d);
    return 2.0 * std::acos(d);
}

Quat random_rotation(Rng& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double u1 = u(rng), u2 = u(rng), u3 = u(rng);
    const double s1 = std::sqrt(1.0 - u1), s2 = std::sqrt(u1);
    const double a = 2.0 * M_PI * u2, b = 2.0 * M_PI * u3;
    return Quat(s1 * std::sin(a), s1 * std::cos(a), s2 * std::sin(b), s2 * std::cos(b)).normalized();
}

Quat random_rotation_perturbation(double sigma, Rng& rng) {
    std::normal_distribution<double> n(0.0, 1.0);
    Vec3 axis(n(rng), n(rng), n(rng));
    double norm = axis.norm();
    if (norm < 1e-14) return Quat::Identity();
    axis /= norm;
    const double angle = n(rng) * sigma;
    return Quat(Eigen::AngleAxisd(angle, axis));
}

Vec3 random_gaussian3(double sigma, Rng& rng) {
    std::normal_distribution<double> n(0.0, sigma);
    return Vec3(n(rng), n(rng), n(rng));
}

void tangent_basis(const Vec3& n, Vec3& t1, Vec3& t2) {
    const Vec3 ref = std::abs(n.z()) < 0.9 ? Vec3::UnitZ() : Vec3::UnitX();
    t1 = n.cross(ref).normalized();
    t2 = n.cross(t1);
}

}  // namespace dexgrasp
