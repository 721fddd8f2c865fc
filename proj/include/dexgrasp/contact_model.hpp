#pragma once

#include <vector>

#include "dexgrasp/hand.hpp"
#include "dexgrasp/kde.hpp"

namespace dexgrasp {

/// Closest point on the surface of a capsule (segment a-b, radius) to p,
/// and the distance from p to that surface.
void capsule_closest_point(const Vec3& a, const Vec3& b, double radius, const Vec3& p,
                           Vec3& surface_point, double& distance);

/// KDE over poses of one hand link relative to nearby surface-feature frames,
/// joint with the local curvatures. Kernel weights fall off exponentially in
/// the feature-to-link distance and are zero at and beyond the cutoff.
struct ContactModel {
    int link_id = -1;
    Kde kde;          // kernel mean: pose u = v_j^-1 o link_pose, curvature r_j
    double lambda = 100.0;  // 1/m^2
    double delta = 0.01;    // meters

    // Provenance: per-kernel feature-to-link distance and the raw Eq-style
    // weight exp(-lambda d^2) before normalization, aligned with kde kernels.
    std::vector<double> distances;
    std::vector<double> raw_weights;

    double eval(const SurfaceFeature& x) const { return kde.eval(x); }

    /// Marginal likelihood of a curvature pair under the model.
    double curvature_likelihood(const Vec2& r) const;
};

ContactModel learn_contact_model(const std::vector<SurfaceFeature>& features,
                                 const Pose& link_pose, int link_id, const CapsuleLink& geometry,
                                 double lambda, double delta, const KernelBandwidth& bandwidth);

/// Symmetrized Monte-Carlo log-density-ratio distance between two contact
/// models. Deterministic: both models are sampled with the same fixed seed,
/// so the value is exactly symmetric in its arguments.
double contact_model_distance(const ContactModel& a, const ContactModel& b, int sample_count);

}  // namespace dexgrasp
