#include "dexgrasp/ply.hpp"

#include <fstream>
#include <sstream>

#include "dexgrasp/errors.hpp"

namespace dexgrasp {

void write_ply(const std::string& path, const std::vector<Vec3>& points) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("write_ply: cannot open " + path);
    os << "ply\nformat binary_little_endian 1.0\n"
       << "element vertex " << points.size() << "\n"
       << "property float x\nproperty float y\nproperty float z\nend_header\n";
    for (const Vec3& p : points) {
        const float row[3] = {static_cast<float>(p.x()), static_cast<float>(p.y()),
                              static_cast<float>(p.z())};
        os.write(reinterpret_cast<const char*>(row), sizeof(row));
    }
}

std::vector<Vec3> read_ply(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("read_ply: cannot open " + path);
    std::string line;
    size_t count = 0;
    bool header_ok = false;
    while (std::getline(is, line)) {
        if (line.rfind("element vertex", 0) == 0) {
            std::istringstream ss(line.substr(14));
            ss >> count;
        } else if (line == "end_header") {
            header_ok = true;
            break;
        }
    }
    if (!header_ok) throw IoError("read_ply: malformed header in " + path);
    std::vector<Vec3> points(count);
    for (size_t i = 0; i < count; ++i) {
        float row[3];
        is.read(reinterpret_cast<char*>(row), sizeof(row));
        if (!is) throw IoError("read_ply: truncated vertex data in " + path);
        points[i] = Vec3(row[0], row[1], row[2]);
    }
    return points;
}

void write_feature_cache(const std::string& path, const std::vector<SurfaceFeature>& features) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("write_feature_cache: cannot open " + path);
    for (const SurfaceFeature& f : features) {
        const float row[9] = {
            static_cast<float>(f.pose.p.x()), static_cast<float>(f.pose.p.y()),
            static_cast<float>(f.pose.p.z()), static_cast<float>(f.pose.q.w()),
            static_cast<float>(f.pose.q.x()), static_cast<float>(f.pose.q.y()),
            static_cast<float>(f.pose.q.z()), static_cast<float>(f.r.x()),
            static_cast<float>(f.r.y())};
        os.write(reinterpret_cast<const char*>(row), sizeof(row));
    }
}

std::vector<SurfaceFeature> read_feature_cache(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("read_feature_cache: cannot open " + path);
    std::vector<SurfaceFeature> features;
    float row[9];
    while (is.read(reinterpret_cast<char*>(row), sizeof(row))) {
        SurfaceFeature f;
        f.pose.p = Vec3(row[0], row[1], row[2]);
        f.pose.q = Quat(row[3], row[4], row[5], row[6]).normalized();
        f.r = Vec2(row[7], row[8]);
        features.push_back(f);
    }
    return features;
}

}  // namespace dexgrasp
