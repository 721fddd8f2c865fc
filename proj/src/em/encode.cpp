#include "dexgrasp/em/encode.hpp"

#include <cmath>

#include "dexgrasp/errors.hpp"

namespace dexgrasp::em {

Tensor colourise(const DepthImage& image, const CameraIntrinsics& in,
                 const ColouriseConfig& cfg) {
    if (image.width < cfg.crop || image.height < cfg.crop)
        throw BadDimensions("colourise: image smaller than the crop window");
    const int x0 = (image.width - cfg.crop) / 2;
    const int y0 = (image.height - cfg.crop) / 2;

    // Area downsample of the central crop; invalid pixels are excluded from
    // the average, fully invalid bins stay 0.
    const int n = cfg.out;
    std::vector<double> depth(static_cast<size_t>(n) * n, 0.0);
    for (int oy = 0; oy < n; ++oy) {
        const int sy0 = y0 + oy * cfg.crop / n;
        const int sy1 = y0 + std::max((oy + 1) * cfg.crop / n, oy * cfg.crop / n + 1);
        for (int ox = 0; ox < n; ++ox) {
            const int sx0 = x0 + ox * cfg.crop / n;
            const int sx1 = x0 + std::max((ox + 1) * cfg.crop / n, ox * cfg.crop / n + 1);
            double sum = 0;
            int count = 0;
            for (int v = sy0; v < sy1; ++v)
                for (int u = sx0; u < sx1; ++u)
                    if (image.at(u, v) > 0) {
                        sum += image.at(u, v);
                        ++count;
                    }
            if (count > 0) depth[static_cast<size_t>(oy) * n + ox] = sum / count;
        }
    }

    // Effective intrinsics of the cropped and downsampled image.
    const double s = static_cast<double>(n) / cfg.crop;
    const double fx = in.fx * s, fy = in.fy * s;

    Tensor out({3, n, n});
    const size_t plane = static_cast<size_t>(n) * n;
    auto z_at = [&](int x, int y) { return depth[static_cast<size_t>(y) * n + x]; };
    const double jump = 0.05;  // depth discontinuity guard (meters)
    for (int y = 0; y < n; ++y) {
        for (int x = 0; x < n; ++x) {
            const size_t i = static_cast<size_t>(y) * n + x;
            const double z = depth[i];
            out.data[i] = z / cfg.max_depth;
            if (z <= 0 || x == 0 || y == 0 || x == n - 1 || y == n - 1) continue;
            const double zl = z_at(x - 1, y), zr = z_at(x + 1, y);
            const double zu = z_at(x, y - 1), zd = z_at(x, y + 1);
            const double c1 = z_at(x - 1, y - 1), c2 = z_at(x + 1, y - 1);
            const double c3 = z_at(x - 1, y + 1), c4 = z_at(x + 1, y + 1);
            bool ok = true;
            for (double zz : {zl, zr, zu, zd, c1, c2, c3, c4})
                ok = ok && zz > 0 && std::abs(zz - z) < jump;
            if (!ok) continue;

            // Local quadric of the depth surface in camera-metric coordinates:
            // pixel pitch at this depth is z/f meters.
            const double a = z / fx, b = z / fy;
            const double f_x = (zr - zl) / (2 * a);
            const double f_y = (zd - zu) / (2 * b);
            const double f_xx = (zr - 2 * z + zl) / (a * a);
            const double f_yy = (zd - 2 * z + zu) / (b * b);
            const double f_xy = (c4 - c3 - c2 + c1) / (4 * a * b);
            const double g = 1 + f_x * f_x + f_y * f_y;
            const double H = ((1 + f_x * f_x) * f_yy - 2 * f_x * f_y * f_xy +
                              (1 + f_y * f_y) * f_xx) /
                             (2 * std::pow(g, 1.5));
            const double K = (f_xx * f_yy - f_xy * f_xy) / (g * g);
            out.data[plane + i] = std::clamp(H, -cfg.curvature_clamp, cfg.curvature_clamp);
            out.data[2 * plane + i] = std::clamp(K, -cfg.curvature_clamp, cfg.curvature_clamp);
        }
    }
    return out;
}

std::vector<double> encode_trajectory(const std::vector<Waypoint>& waypoints, const Pose& camera,
                                      int grasp_type) {
    if (grasp_type < 1 || grasp_type > kGraspTypes)
        throw BadType("encode_trajectory: grasp type outside 1..10");
    if (static_cast<int>(waypoints.size()) != kWaypoints)
        throw DimensionMismatch("encode_trajectory: expected 10 waypoints");
    const Pose to_cam = camera.inverse();
    std::vector<double> out;
    out.reserve(kTrajectoryDim);
    for (const Waypoint& w : waypoints) {
        Waypoint c = w;
        c.wrist = to_cam.compose(w.wrist);
        const std::vector<double> packed = pack_waypoint(c);
        out.insert(out.end(), packed.begin(), packed.end());
    }
    for (int t = 1; t <= kGraspTypes; ++t) out.push_back(t == grasp_type ? 1.0 : 0.0);
    return out;
}

std::vector<Waypoint> decode_trajectory(const std::vector<double>& encoding, const Pose& camera,
                                        int dof) {
    if (static_cast<int>(encoding.size()) != kTrajectoryDim)
        throw DimensionMismatch("decode_trajectory: expected 280 values");
    std::vector<Waypoint> out;
    for (int s = 0; s < kWaypoints; ++s) {
        const std::vector<double> packed(encoding.begin() + s * kWaypointFloats,
                                         encoding.begin() + (s + 1) * kWaypointFloats);
        Waypoint w = unpack_waypoint(packed, dof);
        w.wrist = camera.compose(w.wrist);
        out.push_back(std::move(w));
    }
    return out;
}

int decode_grasp_type(const std::vector<double>& encoding) {
    int best = 1;
    double best_v = -1;
    for (int t = 0; t < kGraspTypes; ++t) {
        const double v = encoding[encoding.size() - kGraspTypes + t];
        if (v > best_v) {
            best_v = v;
            best = t + 1;
        }
    }
    return best;
}

}  // namespace dexgrasp::em
