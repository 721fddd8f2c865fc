#include "dexgrasp/contact_model.hpp"

#include <cmath>

#include "dexgrasp/errors.hpp"

namespace dexgrasp {

void capsule_closest_point(const Vec3& a, const Vec3& b, double radius, const Vec3& p,
                           Vec3& surface_point, double& distance) {
    const Vec3 ab = b - a;
    const double len2 = ab.squaredNorm();
    double t = len2 > 0 ? std::clamp((p - a).dot(ab) / len2, 0.0, 1.0) : 0.0;
    const Vec3 c = a + t * ab;
    const Vec3 d = p - c;
    const double dn = d.norm();
    if (dn > 1e-12) {
        surface_point = c + (radius / dn) * d;
    } else {
        // Point on the axis: any radial direction is closest.
        Vec3 t1, t2;
        tangent_basis(len2 > 0 ? Vec3(ab.normalized()) : Vec3::UnitZ(), t1, t2);
        surface_point = c + radius * t1;
    }
    distance = std::abs(dn - radius);
}

double ContactModel::curvature_likelihood(const Vec2& r) const {
    double sum = 0;
    for (const Kde::Kernel& k : kde.kernels())
        sum += k.weight * std::exp(log_eval_curvature_kernel(r, k.mean.r, kde.bandwidth().sigma_r));
    return sum;
}

ContactModel learn_contact_model(const std::vector<SurfaceFeature>& features,
                                 const Pose& link_pose, int link_id, const CapsuleLink& geometry,
                                 double lambda, double delta, const KernelBandwidth& bandwidth) {
    const Vec3 seg_a = link_pose.p;
    const Vec3 seg_b = link_pose.apply(Vec3(geometry.length, 0, 0));

    std::vector<Kde::Kernel> kernels;
    std::vector<double> distances, raw_weights;
    for (const SurfaceFeature& f : features) {
        Vec3 a_ij;
        double dist;
        capsule_closest_point(seg_a, seg_b, geometry.radius, f.pose.p, a_ij, dist);
        if (dist >= delta) continue;
        const double w = std::exp(-lambda * dist * dist);
        Kde::Kernel k;
        k.mean.pose = f.pose.inverse().compose(link_pose);
        k.mean.r = f.r;
        k.weight = w;
        kernels.push_back(k);
        distances.push_back(dist);
        raw_weights.push_back(w);
    }
    if (kernels.empty()) throw NoContact("learn_contact_model: no feature within delta of the link");

    ContactModel m;
    m.link_id = link_id;
    m.kde = Kde(std::move(kernels), bandwidth);
    m.lambda = lambda;
    m.delta = delta;
    m.distances = std::move(distances);
    m.raw_weights = std::move(raw_weights);
    return m;
}

double contact_model_distance(const ContactModel& a, const ContactModel& b, int sample_count) {
    if (sample_count < 100)
        throw std::invalid_argument("contact_model_distance: sample count must be >= 100");
    constexpr uint64_t kSeed = 0xD15EA5Eull;
    constexpr double kFloor = 1e-300;

    auto directed = [&](const ContactModel& from, const ContactModel& to) {
        Rng rng(kSeed);
        double acc = 0;
        for (int i = 0; i < sample_count; ++i) {
            const SurfaceFeature x = from.kde.sample(rng);
            const double pf = std::max(from.kde.eval(x), kFloor);
            const double pt = std::max(to.kde.eval(x), kFloor);
            acc += std::log(pf / pt);
        }
        return acc / sample_count;
    };

    return 0.5 * (directed(a, b) + directed(b, a));
}

}  // namespace dexgrasp
