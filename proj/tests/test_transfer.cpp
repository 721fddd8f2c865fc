#include <doctest.h>

#include <cmath>

#include "dexgrasp/errors.hpp"
#include "dexgrasp/query_density.hpp"

using namespace dexgrasp;

namespace {

ContactModel curvature_contact(const Vec2& r, const Vec3& offset, const KernelBandwidth& bw) {
    const std::vector<SurfaceFeature> features = {
        SurfaceFeature(Pose(offset + Vec3(0, 0.009, 0), Quat::Identity()), r)};
    return learn_contact_model(features, Pose(), 2, CapsuleLink{0.008, 0.05}, 100.0, 0.01, bw);
}

ObjectModel object_from(const std::vector<SurfaceFeature>& features, const KernelBandwidth& bw) {
    return build_object_model(features, bw);
}

}  // namespace

TEST_CASE("QueryDensity evaluation and sampling") {
    Rng rng(61);
    std::vector<QueryDensity::Kernel> kernels;
    const double w[3] = {0.2, 0.3, 0.5};
    for (int i = 0; i < 3; ++i)
        kernels.push_back({Pose(Vec3(0.1 * i, 0, 0), random_rotation(rng)), w[i]});
    const QueryDensity qd(kernels, 0.005, 100.0, 4, 2);
    CHECK(qd.link_id() == 4);
    CHECK(qd.grasp_type() == 2);

    SUBCASE("weights are normalized and the mode is the heaviest kernel") {
        double sum = 0;
        for (const auto& k : qd.kernels()) sum += k.weight;
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
        CHECK((qd.mode().p - Vec3(0.2, 0, 0)).norm() < 1e-15);
    }

    SUBCASE("log_eval matches a directly computed mixture") {
        for (int trial = 0; trial < 20; ++trial) {
            const Pose s(Vec3(0.1, 0.002, -0.001) + 0.01 * Vec3::Random(), random_rotation(rng));
            double mix = 0;
            for (const auto& k : qd.kernels())
                mix += k.weight * std::exp(log_eval_pose_kernel(s, k.mean, 0.005, 100.0));
            CHECK(qd.log_eval(s) == doctest::Approx(std::log(mix)).epsilon(1e-10));
        }
    }

    SUBCASE("log_eval is exactly invariant under a rigid transform of everything") {
        const Pose t(Vec3(0.3, -0.2, 0.5), random_rotation(rng));
        std::vector<QueryDensity::Kernel> moved;
        for (const auto& k : qd.kernels()) moved.push_back({t.compose(k.mean), k.weight});
        const QueryDensity qd_t(moved, 0.005, 100.0, 4, 2);
        for (int trial = 0; trial < 20; ++trial) {
            const Pose s(0.3 * Vec3::Random(), random_rotation(rng));
            CHECK(qd_t.log_eval(t.compose(s)) == doctest::Approx(qd.log_eval(s)).epsilon(1e-12));
        }
    }

    SUBCASE("sampling frequencies match the weights") {
        const int n = 30000;
        int counts[3] = {0, 0, 0};
        for (int i = 0; i < n; ++i) {
            const Pose s = qd.sample(rng);
            int nearest = 0;
            double best = 1e9;
            for (int k = 0; k < 3; ++k) {
                const double d = (s.p - kernels[k].mean.p).norm();
                if (d < best) {
                    best = d;
                    nearest = k;
                }
            }
            ++counts[nearest];
        }
        for (int k = 0; k < 3; ++k) {
            const double sigma = std::sqrt(n * w[k] * (1 - w[k]));
            CHECK(std::abs(counts[k] - n * w[k]) <= 4.0 * sigma);
        }
    }

    SUBCASE("degenerate inputs throw") {
        CHECK_THROWS_AS(QueryDensity({}, 0.005, 100.0, 0, 1), EmptyInput);
        CHECK_THROWS_AS(QueryDensity({{Pose(), 0.0}}, 0.005, 100.0, 0, 1), std::invalid_argument);
    }
}

TEST_CASE("compute_query_density") {
    Rng rng(67);
    KernelBandwidth bw;
    const Vec2 flat(0.5, 0.2);

    SUBCASE("kernels land at object-feature pose composed with the contact pose") {
        const ContactModel contact = curvature_contact(flat, Vec3(0.01, 0, 0.002), bw);
        const Pose v(Vec3(0.4, 0.1, 0.3), random_rotation(rng));
        const ObjectModel object = object_from({SurfaceFeature(v, flat)}, bw);

        TransferOptions opts;
        opts.kq = 300;
        const QueryDensity qd = compute_query_density(contact, object, opts, rng);
        REQUIRE(qd.kernels().size() == 300);
        CHECK(qd.link_id() == 2);

        const Pose expected = v.compose(contact.kde.kernels()[0].mean.pose);
        Vec3 mean = Vec3::Zero();
        for (const auto& k : qd.kernels()) mean += k.mean.p;
        mean /= 300.0;
        // Two independent sigma_p jitters (object sample + contact sample).
        CHECK((mean - expected.p).norm() < 5.0 * bw.sigma_p * std::sqrt(2.0 / 300.0) * 3.0 + 1e-3);
        for (const auto& k : qd.kernels())
            CHECK((k.mean.p - expected.p).norm() < 10.0 * bw.sigma_p);
    }

    SUBCASE("curvature gating concentrates mass on matching geometry") {
        const ContactModel contact = curvature_contact(flat, Vec3::Zero(), bw);
        // Two spatially separated object regions; only one matches the contact
        // model's curvature.
        std::vector<SurfaceFeature> features;
        for (int i = 0; i < 20; ++i) {
            features.push_back(SurfaceFeature(Pose(Vec3(0, 0, 0.001 * i), Quat::Identity()), flat));
            features.push_back(
                SurfaceFeature(Pose(Vec3(1, 0, 0.001 * i), Quat::Identity()), Vec2(80, 60)));
        }
        const ObjectModel object = object_from(features, bw);
        TransferOptions opts;
        opts.kq = 500;
        const QueryDensity qd = compute_query_density(contact, object, opts, rng);
        double matched = 0, total = 0;
        for (const auto& k : qd.kernels()) {
            total += k.weight;
            if (k.mean.p.x() < 0.5) matched += k.weight;
        }
        CHECK(matched / total > 0.95);
    }

    SUBCASE("a prototype curvature gate shifts the mass") {
        // Contact model is ambivalent (broad curvature), prototype prefers the
        // high-curvature region.
        KernelBandwidth wide = bw;
        wide.sigma_r = 100.0;  // contact gate nearly flat
        const ContactModel contact = curvature_contact(flat, Vec3::Zero(), wide);
        const ContactModel prototype = curvature_contact(Vec2(80, 60), Vec3::Zero(), bw);
        std::vector<SurfaceFeature> features;
        for (int i = 0; i < 20; ++i) {
            features.push_back(SurfaceFeature(Pose(Vec3(0, 0, 0.001 * i), Quat::Identity()), flat));
            features.push_back(
                SurfaceFeature(Pose(Vec3(1, 0, 0.001 * i), Quat::Identity()), Vec2(80, 60)));
        }
        const ObjectModel object = object_from(features, bw);
        TransferOptions opts;
        opts.kq = 500;
        opts.prototype = &prototype;
        const QueryDensity qd = compute_query_density(contact, object, opts, rng);
        double high = 0, total = 0;
        for (const auto& k : qd.kernels()) {
            total += k.weight;
            if (k.mean.p.x() > 0.5) high += k.weight;
        }
        CHECK(high / total > 0.95);
    }

    SUBCASE("curvature support mismatch falls back to uniform weights") {
        const ContactModel contact = curvature_contact(Vec2(1e4, 1e4), Vec3::Zero(), bw);
        const ObjectModel object = object_from({SurfaceFeature(Pose(), flat)}, bw);
        TransferOptions opts;
        opts.kq = 50;
        const QueryDensity qd = compute_query_density(contact, object, opts, rng);
        for (const auto& k : qd.kernels())
            CHECK(k.weight == doctest::Approx(1.0 / 50.0).epsilon(1e-12));
    }

    SUBCASE("bad inputs throw") {
        const ContactModel contact = curvature_contact(flat, Vec3::Zero(), bw);
        const ObjectModel object = object_from({SurfaceFeature(Pose(), flat)}, bw);
        TransferOptions opts;
        opts.kq = 0;
        CHECK_THROWS_AS(compute_query_density(contact, object, opts, rng), std::invalid_argument);
        opts.kq = 10;
        CHECK_THROWS_AS(compute_query_density(contact, ObjectModel{}, opts, rng),
                        DegenerateObject);
    }
}

TEST_CASE("query_density_batch covers every contact model") {
    Rng rng(71);
    KernelBandwidth bw;
    GraspModel model;
    model.grasp_type = 6;
    model.contacts.push_back(curvature_contact(Vec2(1, 0), Vec3::Zero(), bw));
    model.contacts.push_back(curvature_contact(Vec2(2, 1), Vec3(0.02, 0, 0), bw));
    model.contacts.back().link_id = 5;
    VecX start = VecX::Zero(4), grip = VecX::Constant(4, 1.0);
    model.hand_config = HandConfigModel(start, grip, 10.0, 1.2, 0.05, 10);

    const ObjectModel object =
        object_from({SurfaceFeature(Pose(Vec3(0.3, 0, 0), Quat::Identity()), Vec2(1, 0))}, bw);
    TransferOptions opts;
    opts.kq = 64;
    const QueryDensityBatch batch = query_density_batch(model, object, opts, rng);
    REQUIRE(batch.densities.size() == 2);
    CHECK(batch.densities[0].grasp_type() == 6);
    CHECK(batch.densities[1].grasp_type() == 6);
    CHECK(batch.densities[0].link_id() == 2);
    CHECK(batch.densities[1].link_id() == 5);
    for (const auto& qd : batch.densities) CHECK(qd.kernels().size() == 64);
    CHECK(batch.wall_seconds >= 0.0);
}
