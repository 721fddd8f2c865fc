#include "dexgrasp/features.hpp"

#include <cmath>
#include <cstdint>
#include <unordered_map>

#include "dexgrasp/errors.hpp"

namespace dexgrasp {

namespace {

struct CellKey {
    int64_t x, y, z;
    bool operator==(const CellKey&) const = default;
};

struct CellHash {
    size_t operator()(const CellKey& k) const {
        size_t h = 1469598103934665603ull;
        for (int64_t v : {k.x, k.y, k.z}) {
            h ^= static_cast<size_t>(v);
            h *= 1099511628211ull;
        }
        return h;
    }
};

CellKey cell_of(const Vec3& p, double cell) {
    return CellKey{static_cast<int64_t>(std::floor(p.x() / cell)),
                   static_cast<int64_t>(std::floor(p.y() / cell)),
                   static_cast<int64_t>(std::floor(p.z() / cell))};
}

}  // namespace

PrincipalCurvatures fit_principal_curvatures(const std::vector<Vec3>& offsets, const Vec3& normal) {
    Vec3 t1, t2;
    tangent_basis(normal, t1, t2);

    // h(x, y) = a x^2 + b xy + c y^2 + d x + e y in the tangent frame; the
    // patch is constrained through the query point.
    MatX A(offsets.size(), 5);
    VecX h(offsets.size());
    for (size_t i = 0; i < offsets.size(); ++i) {
        const double x = offsets[i].dot(t1);
        const double y = offsets[i].dot(t2);
        A.row(i) << x * x, x * y, y * y, x, y;
        h(i) = offsets[i].dot(normal);
    }
    const Eigen::JacobiSVD<MatX> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const double cond_floor = 1e-6 * svd.singularValues()(0);
    const VecX coef = svd.solve(h);
    const double a = coef(0), b = coef(1), c = coef(2), d = coef(3), e = coef(4);

    // Shape operator from the fundamental forms at the origin of the patch.
    const double s = std::sqrt(1.0 + d * d + e * e);
    Eigen::Matrix2d I, II;
    I << 1.0 + d * d, d * e, d * e, 1.0 + e * e;
    II << 2.0 * a / s, b / s, b / s, 2.0 * c / s;
    // Curvature sign convention: convex toward the sensor-facing normal is positive.
    const Eigen::Matrix2d shape = -I.inverse() * II;

    const Eigen::EigenSolver<Eigen::Matrix2d> es(shape);
    double k[2] = {es.eigenvalues()[0].real(), es.eigenvalues()[1].real()};
    Eigen::Vector2d v[2] = {es.eigenvectors().col(0).real(), es.eigenvectors().col(1).real()};
    if (k[0] < k[1]) {
        std::swap(k[0], k[1]);
        std::swap(v[0], v[1]);
    }

    PrincipalCurvatures out;
    out.well_conditioned = svd.singularValues()(4) > cond_floor;
    out.k1 = k[0];
    out.k2 = k[1];
    out.dir1 = (v[0].x() * t1 + v[0].y() * t2).normalized();
    // Re-orthogonalize: the shape operator is self-adjoint w.r.t. I, not Euclidean.
    out.dir2 = normal.cross(out.dir1);
    return out;
}

std::vector<SurfaceFeature> extract_features(const std::vector<Vec3>& cloud, double radius,
                                             const Vec3& sensor_origin) {
    if (cloud.size() < 10) throw std::invalid_argument("extract_features: cloud has < 10 points");
    if (radius <= 0) throw std::invalid_argument("extract_features: radius must be > 0");

    std::unordered_map<CellKey, std::vector<int>, CellHash> grid;
    for (size_t i = 0; i < cloud.size(); ++i) grid[cell_of(cloud[i], radius)].push_back(static_cast<int>(i));

    std::vector<SurfaceFeature> features;
    const double r2 = radius * radius;
    std::vector<Vec3> offsets;
    for (size_t i = 0; i < cloud.size(); ++i) {
        offsets.clear();
        const CellKey ck = cell_of(cloud[i], radius);
        for (int64_t dx = -1; dx <= 1; ++dx)
            for (int64_t dy = -1; dy <= 1; ++dy)
                for (int64_t dz = -1; dz <= 1; ++dz) {
                    auto it = grid.find(CellKey{ck.x + dx, ck.y + dy, ck.z + dz});
                    if (it == grid.end()) continue;
                    for (int j : it->second) {
                        if (j == static_cast<int>(i)) continue;
                        const Vec3 off = cloud[j] - cloud[i];
                        if (off.squaredNorm() <= r2) offsets.push_back(off);
                    }
                }
        if (offsets.size() < 5) continue;

        // PCA normal of the neighborhood.
        Vec3 mean = Vec3::Zero();
        for (const Vec3& o : offsets) mean += o;
        mean /= static_cast<double>(offsets.size());
        Mat3 cov = Mat3::Zero();
        for (const Vec3& o : offsets) cov += (o - mean) * (o - mean).transpose();
        const Eigen::SelfAdjointEigenSolver<Mat3> es(cov);
        Vec3 n = es.eigenvectors().col(0);
        if (n.dot(sensor_origin - cloud[i]) < 0) n = -n;

        PrincipalCurvatures pc = fit_principal_curvatures(offsets, n);
        if (!pc.well_conditioned) continue;

        // In-plane axis: tangent projection of the viewing direction. Principal
        // directions are eigenvector noise on umbilic and planar patches, so
        // they cannot serve as a repeatable frame; the view projection is
        // deterministic everywhere the normal is off the view axis.
        Vec3 dir1 = sensor_origin - cloud[i];
        dir1 -= dir1.dot(n) * n;
        if (dir1.norm() > 1e-9) {
            dir1.normalize();
        } else {
            dir1 = pc.dir1;
            for (int a = 0; a < 3; ++a) {
                if (std::abs(dir1[a]) > 1e-12) {
                    if (dir1[a] < 0) dir1 = -dir1;
                    break;
                }
            }
        }
        const Vec3 dir2 = n.cross(dir1);

        Mat3 frame;
        frame.col(0) = dir1;
        frame.col(1) = dir2;
        frame.col(2) = n;
        SurfaceFeature f;
        f.pose = Pose(cloud[i], Quat(frame));
        f.r = Vec2(pc.k1, pc.k2);
        if (!f.r.allFinite()) continue;
        features.push_back(f);
    }
    if (features.empty()) throw TooSparse("extract_features: no point has enough neighbors");
    return features;
}

}  // namespace dexgrasp
