#include "dexgrasp/render.hpp"

#include <cmath>
#include <cstdint>
#include <fstream>

#include "dexgrasp/errors.hpp"

namespace dexgrasp {

Pose camera_pose_at(const Vec3& target, double distance, double elevation_rad,
                    double azimuth_rad) {
    const Vec3 offset(std::cos(elevation_rad) * std::cos(azimuth_rad),
                      std::cos(elevation_rad) * std::sin(azimuth_rad),
                      std::sin(elevation_rad));
    const Vec3 position = target + distance * offset;
    const Vec3 z = (target - position).normalized();
    Vec3 x = z.cross(Vec3::UnitZ());
    if (x.norm() < 1e-9) x = Vec3::UnitX();
    x.normalize();
    const Vec3 y = z.cross(x);
    Mat3 rot;
    rot.col(0) = x;
    rot.col(1) = y;
    rot.col(2) = z;
    return Pose(position, Quat(rot));
}

Pose sample_camera_pose(const Vec3& target, double distance, Rng& rng) {
    const double elevation =
        std::uniform_real_distribution<double>(30.0 * M_PI / 180.0, 57.0 * M_PI / 180.0)(rng);
    const double azimuth = std::uniform_real_distribution<double>(0.0, 2.0 * M_PI)(rng);
    return camera_pose_at(target, distance, elevation, azimuth);
}

RenderResult render_depth(const AnalyticObject& object, const Pose& camera,
                          const CameraIntrinsics& in, double noise_sigma, Rng& rng) {
    RenderResult out;
    out.camera = camera;
    out.depth.width = in.width;
    out.depth.height = in.height;
    out.depth.depth.assign(static_cast<size_t>(in.width) * in.height, 0.0f);

    // Bounding sphere pre-test: only march rays that can reach the object.
    const Vec3 center = object.pose.p;
    const double bound = object.bounding_radius() + 0.01;

    for (int v = 0; v < in.height; ++v) {
        for (int u = 0; u < in.width; ++u) {
            const Vec3 dir_cam =
                Vec3((u - in.cx) / in.fx, (v - in.cy) / in.fy, 1.0).normalized();
            const Vec3 dir = camera.q * dir_cam;
            const Vec3 oc = camera.p - center;
            const double b = oc.dot(dir);
            const double disc = b * b - (oc.squaredNorm() - bound * bound);
            if (disc < 0) continue;
            const double t_near = std::max(0.0, -b - std::sqrt(disc));
            const double t_max = -b + std::sqrt(disc);
            double t = t_near;
            bool hit = false;
            for (int step = 0; step < 512 && t < t_max; ++step) {
                const double d = object.sdf(camera.p + t * dir);
                if (d < 1e-6) {
                    hit = true;
                    break;
                }
                t += d;
            }
            if (!hit) continue;
            Vec3 p_cam = t * dir_cam;
            if (noise_sigma > 0) p_cam += random_gaussian3(noise_sigma, rng);
            out.depth.at(u, v) = static_cast<float>(p_cam.z());
            out.cloud.push_back(camera.apply(p_cam));
        }
    }
    if (out.cloud.size() < 250)
        throw TooFewPoints("render_depth: fewer than 250 valid depth points");
    return out;
}

void write_depth(const std::string& path, const DepthImage& image) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("write_depth: cannot open " + path);
    const int32_t wh[2] = {image.width, image.height};
    os.write(reinterpret_cast<const char*>(wh), sizeof(wh));
    os.write(reinterpret_cast<const char*>(image.depth.data()),
             static_cast<std::streamsize>(image.depth.size() * sizeof(float)));
}

DepthImage read_depth(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("read_depth: cannot open " + path);
    int32_t wh[2];
    is.read(reinterpret_cast<char*>(wh), sizeof(wh));
    DepthImage image;
    image.width = wh[0];
    image.height = wh[1];
    image.depth.resize(static_cast<size_t>(wh[0]) * wh[1]);
    is.read(reinterpret_cast<char*>(image.depth.data()),
            static_cast<std::streamsize>(image.depth.size() * sizeof(float)));
    if (!is) throw IoError("read_depth: truncated file " + path);
    return image;
}

}  // namespace dexgrasp
