#pragma once

#include <vector>

#include "dexgrasp/objects.hpp"

namespace dexgrasp {

struct CameraIntrinsics {
    int width = 640;
    int height = 480;
    double fx = 525.0, fy = 525.0;
    double cx = 319.5, cy = 239.5;
};

/// Depth in meters along the optical axis; 0 marks invalid pixels.
struct DepthImage {
    int width = 0, height = 0;
    std::vector<float> depth;

    float at(int u, int v) const { return depth[v * width + u]; }
    float& at(int u, int v) { return depth[v * width + u]; }
};

struct RenderResult {
    DepthImage depth;
    std::vector<Vec3> cloud;  // world frame, one point per valid pixel (row-major)
    Pose camera;              // camera frame -> world, +z optical axis
};

/// Camera pose looking at `target` from `distance`, with elevation uniform in
/// [30, 57] degrees and azimuth in [0, 2 pi).
Pose sample_camera_pose(const Vec3& target, double distance, Rng& rng);
Pose camera_pose_at(const Vec3& target, double distance, double elevation_rad,
                    double azimuth_rad);

/// Sphere-traced depth render of a single object. Each valid point is shifted
/// by an isotropic 3D Gaussian of the given sigma (0 disables noise). Throws
/// TooFewPoints below 250 valid pixels.
RenderResult render_depth(const AnalyticObject& object, const Pose& camera,
                          const CameraIntrinsics& intrinsics, double noise_sigma, Rng& rng);

void write_depth(const std::string& path, const DepthImage& image);
DepthImage read_depth(const std::string& path);

}  // namespace dexgrasp
