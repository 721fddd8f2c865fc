#pragma once

#include "dexgrasp/pose.hpp"

namespace dexgrasp {

/// Local surface patch descriptor: frame (curvature directions + normal)
/// and the two principal curvatures, r.x() >= r.y(), in 1/m.
struct SurfaceFeature {
    Pose pose;
    Vec2 r = Vec2::Zero();

    SurfaceFeature() = default;
    SurfaceFeature(const Pose& pose_, const Vec2& r_) : pose(pose_), r(r_) {}
};

struct KernelBandwidth {
    double sigma_p = 0.005;  // meters
    double sigma_q = 100.0;  // von Mises-Fisher concentration
    double sigma_r = 5.0;    // 1/meters

    bool valid() const { return sigma_p > 0 && sigma_q > 0 && sigma_r > 0; }
};

/// log of the n-variate isotropic Gaussian density.
double log_gaussian(const VecX& x, const VecX& mu, double sigma);
double log_gaussian3(const Vec3& x, const Vec3& mu, double sigma);

/// log normalizer of the von Mises-Fisher density on S^3 (in R^4).
double log_vmf_normalizer_s3(double kappa);

/// log density of the antipodal vMF pair at quaternion dot product t = q.mu.
/// Symmetric in the sign of t; integrates to 1 over S^3.
double log_vmf_pair(double t, double kappa);

/// Sample from a single vMF on S^3 with mean mu (Wood's rejection method).
Quat sample_vmf_s3(const Quat& mu, double kappa, Rng& rng);

/// Sample from the antipodal vMF pair.
Quat sample_vmf_pair(const Quat& mu, double kappa, Rng& rng);

/// Product kernel N3(p) * Theta(q) * N2(r) of Eq-style SE(3)xR^2 features.
double log_eval_kernel(const SurfaceFeature& x, const SurfaceFeature& mu,
                       const KernelBandwidth& sigma);
double eval_kernel(const SurfaceFeature& x, const SurfaceFeature& mu,
                   const KernelBandwidth& sigma);

SurfaceFeature sample_kernel(const SurfaceFeature& mu, const KernelBandwidth& sigma, Rng& rng);

/// Position-orientation kernel only (used by query densities).
double log_eval_pose_kernel(const Pose& x, const Pose& mu, double sigma_p, double sigma_q);

/// Curvature marginal of the feature kernel.
double log_eval_curvature_kernel(const Vec2& r, const Vec2& mu, double sigma_r);

/// Transform a feature by a rigid transform: frame and position move, curvatures fixed.
SurfaceFeature transform_feature(const Pose& t, const SurfaceFeature& f);

}  // namespace dexgrasp
