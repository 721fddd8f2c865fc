#pragma once

#include <string>
#include <vector>

#include "dexgrasp/kernels.hpp"

namespace dexgrasp {

/// Binary little-endian PLY with x, y, z float32 vertices.
void write_ply(const std::string& path, const std::vector<Vec3>& points);
std::vector<Vec3> read_ply(const std::string& path);

/// Flat binary feature cache. Row layout: 3 f32 position, 4 f32 quaternion
/// (w, x, y, z), 2 f32 curvatures.
void write_feature_cache(const std::string& path, const std::vector<SurfaceFeature>& features);
std::vector<SurfaceFeature> read_feature_cache(const std::string& path);

}  // namespace dexgrasp
