#include "dexgrasp/kernels.hpp"

#include <cmath>

namespace dexgrasp {

namespace {

constexpr double kTwoPi = 2.0 * M_PI;

double log_bessel_i1(double kappa) {
    if (kappa < 50.0) {
        return std::log(std::cyl_bessel_i(1.0, kappa));
    }
    // Uniform asymptotic expansion, accurate to ~1e-12 for kappa >= 50.
    const double z = 8.0 * kappa;
    const double series = 1.0 - 3.0 / z - 15.0 / (2.0 * z * z) - 105.0 / (2.0 * z * z * z);
    return kappa - 0.5 * std::log(kTwoPi * kappa) + std::log(series);
}

}  // namespace

double log_gaussian(const VecX& x, const VecX& mu, double sigma) {
    const double n = static_cast<double>(x.size());
    return -0.5 * n * std::log(kTwoPi * sigma * sigma) -
           (x - mu).squaredNorm() / (2.0 * sigma * sigma);
}

double log_gaussian3(const Vec3& x, const Vec3& mu, double sigma) {
    return -1.5 * std::log(kTwoPi * sigma * sigma) -
           (x - mu).squaredNorm() / (2.0 * sigma * sigma);
}

double log_vmf_normalizer_s3(double kappa) {
    if (kappa < 1e-8) return -std::log(2.0 * M_PI * M_PI);
    return std::log(kappa) - 2.0 * std::log(kTwoPi) - log_bessel_i1(kappa);
}

double log_vmf_pair(double t, double kappa) {
    const double a = std::abs(t) * kappa;
    // 0.5 * C(kappa) * (exp(kappa t) + exp(-kappa t)), evaluated in log space.
    return log_vmf_normalizer_s3(kappa) + a + std::log1p(std::exp(-2.0 * a)) - std::log(2.0);
}

Quat sample_vmf_s3(const Quat& mu, double kappa, Rng& rng) {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::normal_distribution<double> norm(0.0, 1.0);

    // Wood (1994) for dimension p = 4.
    const double p1 = 3.0;  // p - 1
    double w;
    const double b = (-2.0 * kappa + std::sqrt(4.0 * kappa * kappa + p1 * p1)) / p1;
    const double x0 = (1.0 - b) / (1.0 + b);
    const double c = kappa * x0 + p1 * std::log(1.0 - x0 * x0);
    std::gamma_distribution<double> gamma15(1.5, 1.0);
    while (true) {
        const double g1 = gamma15(rng), g2 = gamma15(rng);
        const double z = g1 / (g1 + g2);  // Beta(1.5, 1.5)
        const double u = unif(rng);
        w = (1.0 - (1.0 + b) * z) / (1.0 - (1.0 - b) * z);
        if (kappa * w + p1 * std::log(1.0 - x0 * w) - c >= std::log(u)) break;
    }

    // Uniform tangent direction on S^2 embedded orthogonally to mu in R^4.
    Vec3 v(norm(rng), norm(rng), norm(rng));
    while (v.norm() < 1e-12) v = Vec3(norm(rng), norm(rng), norm(rng));
    v.normalize();

    // mu * (w, s*v) lands at polar angle acos(w) from mu with a uniform
    // tangent direction, and left multiplication makes sampling equivariant:
    // the same draws at a rotated mean give the rotated sample.
    const double s = std::sqrt(std::max(0.0, 1.0 - w * w));
    return (mu * Quat(w, s * v.x(), s * v.y(), s * v.z())).normalized();
}

Quat sample_vmf_pair(const Quat& mu, double kappa, Rng& rng) {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    Quat m = mu;
    if (unif(rng) < 0.5) m = Quat(-mu.w(), -mu.x(), -mu.y(), -mu.z());
    return sample_vmf_s3(m, kappa, rng);
}

double log_eval_kernel(const SurfaceFeature& x, const SurfaceFeature& mu,
                       const KernelBandwidth& sigma) {
    const double lp = log_gaussian3(x.pose.p, mu.pose.p, sigma.sigma_p);
    const double lq = log_vmf_pair(x.pose.q.dot(mu.pose.q), sigma.sigma_q);
    const double lr = -std::log(kTwoPi * sigma.sigma_r * sigma.sigma_r) -
                      (x.r - mu.r).squaredNorm() / (2.0 * sigma.sigma_r * sigma.sigma_r);
    return lp + lq + lr;
}

double eval_kernel(const SurfaceFeature& x, const SurfaceFeature& mu,
                   const KernelBandwidth& sigma) {
    return std::exp(log_eval_kernel(x, mu, sigma));
}

SurfaceFeature sample_kernel(const SurfaceFeature& mu, const KernelBandwidth& sigma, Rng& rng) {
    std::normal_distribution<double> norm(0.0, 1.0);
    SurfaceFeature out;
    // The position delta is isotropic, so drawing it in the kernel frame keeps
    // the density unchanged while making sampling rigidly equivariant.
    out.pose.p = mu.pose.p + mu.pose.q * random_gaussian3(sigma.sigma_p, rng);
    out.pose.q = sample_vmf_pair(mu.pose.q, sigma.sigma_q, rng);
    out.r = mu.r + sigma.sigma_r * Vec2(norm(rng), norm(rng));
    return out;
}

double log_eval_pose_kernel(const Pose& x, const Pose& mu, double sigma_p, double sigma_q) {
    return log_gaussian3(x.p, mu.p, sigma_p) + log_vmf_pair(x.q.dot(mu.q), sigma_q);
}

double log_eval_curvature_kernel(const Vec2& r, const Vec2& mu, double sigma_r) {
    return -std::log(kTwoPi * sigma_r * sigma_r) -
           (r - mu).squaredNorm() / (2.0 * sigma_r * sigma_r);
}

SurfaceFeature transform_feature(const Pose& t, const SurfaceFeature& f) {
    return SurfaceFeature(t.compose(f.pose), f.r);
}

}  // namespace dexgrasp
