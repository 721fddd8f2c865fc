#pragma once

#include "dexgrasp/em/net.hpp"
#include "dexgrasp/render.hpp"

namespace dexgrasp::em {

struct ColouriseConfig {
    int crop = 460;          // central crop of the 640x480 input
    int out = 224;           // output side length
    double max_depth = 2.0;  // channel 0 = depth / max_depth
    double curvature_clamp = 1e4;
};

/// 3-channel 224x224 encoding of a depth image: normalized depth plus mean and
/// Gaussian curvature of the depth surface (local quadric fit in camera-metric
/// coordinates). Invalid pixels are zero in all channels. Throws BadDimensions
/// when the input is smaller than the crop.
Tensor colourise(const DepthImage& image, const CameraIntrinsics& intrinsics,
                 const ColouriseConfig& config = {});

/// 280-vector trajectory encoding: 10 waypoints x 27 values in the camera
/// frame, then a 1-of-10 grasp-type block. Throws BadType for type outside
/// 1..10, DimensionMismatch for a waypoint count other than 10.
std::vector<double> encode_trajectory(const std::vector<Waypoint>& waypoints, const Pose& camera,
                                      int grasp_type);

/// Inverse of encode_trajectory (camera frame back to world).
std::vector<Waypoint> decode_trajectory(const std::vector<double>& encoding, const Pose& camera,
                                        int dof);

int decode_grasp_type(const std::vector<double>& encoding);

}  // namespace dexgrasp::em
