#pragma once

#include <vector>

#include "dexgrasp/kernels.hpp"

namespace dexgrasp {

struct PrincipalCurvatures {
    double k1 = 0, k2 = 0;  // k1 >= k2, sign positive for surfaces convex toward the sensor
    Vec3 dir1 = Vec3::UnitX();
    Vec3 dir2 = Vec3::UnitY();
    bool well_conditioned = true;  // false when the neighborhood underdetermines the patch
};

/// Quadric patch fit in the tangent plane of `normal` over neighbor offsets
/// (world-frame displacements from the query point). `normal` must be unit
/// length and oriented toward the sensor. Needs >= 5 offsets.
PrincipalCurvatures fit_principal_curvatures(const std::vector<Vec3>& offsets, const Vec3& normal);

/// Surface features from a raw cloud: PCA normal per radius-neighborhood
/// (oriented toward `sensor_origin`), principal curvatures from a local
/// quadric fit, frame columns (k1_dir, k2_dir, normal).
///
/// One feature per point with >= 5 neighbors and a well-conditioned patch
/// fit. Throws TooSparse when no point qualifies.
std::vector<SurfaceFeature> extract_features(const std::vector<Vec3>& cloud, double radius,
                                             const Vec3& sensor_origin = Vec3::Zero());

}  // namespace dexgrasp
