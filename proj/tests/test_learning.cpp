#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "dexgrasp/errors.hpp"
#include "dexgrasp/grasp_model.hpp"

using namespace dexgrasp;

namespace {

SurfaceFeature make_feature(const Vec3& p, const Quat& q, const Vec2& r) {
    return SurfaceFeature(Pose(p, q), r);
}

// A compact contact model with a single kernel; the feature sits at
// `offset` plus a small radial gap from a link at the origin, so the kernel
// mean pose varies with `offset`.
ContactModel point_model(const Vec3& offset, const KernelBandwidth& bw) {
    const Pose link(Vec3::Zero(), Quat::Identity());
    const std::vector<SurfaceFeature> features = {
        make_feature(offset + Vec3(0, 0.009, 0.0), Quat::Identity(), Vec2(1.0, 0.5))};
    return learn_contact_model(features, link, 0, CapsuleLink{0.008, 0.05}, 100.0, 0.01, bw);
}

}  // namespace

TEST_CASE("capsule_closest_point") {
    Vec3 s;
    double d;
    const Vec3 a(0, 0, 0), b(0.05, 0, 0);
    const double radius = 0.008;

    SUBCASE("beside the segment midpoint") {
        capsule_closest_point(a, b, radius, Vec3(0.02, 0.03, 0), s, d);
        CHECK(d == doctest::Approx(0.03 - radius).epsilon(1e-12));
        CHECK((s - Vec3(0.02, radius, 0)).norm() < 1e-12);
    }

    SUBCASE("beyond the far endpoint") {
        capsule_closest_point(a, b, radius, Vec3(0.08, 0.04, 0), s, d);
        const double axis_dist = Vec3(0.03, 0.04, 0).norm();  // 0.05
        CHECK(d == doctest::Approx(axis_dist - radius).epsilon(1e-12));
        CHECK((s - b - radius * Vec3(0.03, 0.04, 0).normalized()).norm() < 1e-12);
    }

    SUBCASE("inside the capsule") {
        capsule_closest_point(a, b, radius, Vec3(0.02, 0.003, 0), s, d);
        CHECK(d == doctest::Approx(radius - 0.003).epsilon(1e-12));
    }

    SUBCASE("exactly on the axis still returns a surface point") {
        capsule_closest_point(a, b, radius, Vec3(0.02, 0, 0), s, d);
        CHECK(d == doctest::Approx(radius).epsilon(1e-12));
        CHECK((s - Vec3(0.02, 0, 0)).norm() == doctest::Approx(radius).epsilon(1e-12));
    }
}

TEST_CASE("learn_contact_model") {
    const KernelBandwidth bw;
    const CapsuleLink geom{0.008, 0.05};
    const Pose link(Vec3(0, 0, 0), Quat::Identity());
    const double lambda = 100.0, delta = 0.01;

    SUBCASE("weights follow exp(-lambda d^2) and the cutoff") {
        // Surface distances from the capsule: 0.002, 0.007, 0.012 (beyond delta).
        std::vector<SurfaceFeature> features = {
            make_feature(Vec3(0.02, 0.010, 0), Quat::Identity(), Vec2(2, 1)),
            make_feature(Vec3(0.03, 0.015, 0), Quat::Identity(), Vec2(3, 0)),
            make_feature(Vec3(0.01, 0.020, 0), Quat::Identity(), Vec2(4, -1)),
        };
        const ContactModel m = learn_contact_model(features, link, 7, geom, lambda, delta, bw);
        REQUIRE(m.kde.size() == 2);
        CHECK(m.link_id == 7);
        CHECK(m.distances[0] == doctest::Approx(0.002).epsilon(1e-12));
        CHECK(m.distances[1] == doctest::Approx(0.007).epsilon(1e-12));
        CHECK(m.raw_weights[0] == doctest::Approx(std::exp(-lambda * 0.002 * 0.002)).epsilon(1e-12));
        CHECK(m.raw_weights[1] == doctest::Approx(std::exp(-lambda * 0.007 * 0.007)).epsilon(1e-12));
        // KDE weights are the normalized raw weights.
        const double z = m.raw_weights[0] + m.raw_weights[1];
        CHECK(m.kde.kernels()[0].weight == doctest::Approx(m.raw_weights[0] / z).epsilon(1e-12));
        // Closer feature gets the larger weight.
        CHECK(m.kde.kernels()[0].weight > m.kde.kernels()[1].weight);
        // Curvatures are carried through.
        CHECK(m.kde.kernels()[0].mean.r == Vec2(2, 1));
    }

    SUBCASE("kernel means are link poses in the feature frame") {
        Rng rng(41);
        const Quat fq = random_rotation(rng);
        const Pose wlink(Vec3(0.01, 0.002, -0.003), random_rotation(rng));
        const std::vector<SurfaceFeature> features = {
            make_feature(Vec3(0.012, 0.011, 0.0), fq, Vec2(1, 1))};
        const ContactModel m = learn_contact_model(features, wlink, 0, geom, lambda, delta, bw);
        REQUIRE(m.kde.size() == 1);
        // v o u must recover the link pose.
        const Pose u = m.kde.kernels()[0].mean.pose;
        const Pose recovered = features[0].pose.compose(u);
        CHECK((recovered.p - wlink.p).norm() < 1e-12);
        CHECK(recovered.q.angularDistance(wlink.q) < 1e-12);
    }

    SUBCASE("no feature within delta raises NoContact") {
        const std::vector<SurfaceFeature> features = {
            make_feature(Vec3(0, 0.5, 0), Quat::Identity(), Vec2(0, 0))};
        CHECK_THROWS_AS(learn_contact_model(features, link, 0, geom, lambda, delta, bw), NoContact);
    }

    SUBCASE("curvature likelihood peaks at the stored curvature") {
        const std::vector<SurfaceFeature> features = {
            make_feature(Vec3(0.02, 0.010, 0), Quat::Identity(), Vec2(5, 2))};
        const ContactModel m = learn_contact_model(features, link, 0, geom, lambda, delta, bw);
        CHECK(m.curvature_likelihood(Vec2(5, 2)) > m.curvature_likelihood(Vec2(5, 2 + bw.sigma_r)));
        const double expected =
            std::exp(log_eval_curvature_kernel(Vec2(5, 2), Vec2(5, 2), bw.sigma_r));
        CHECK(m.curvature_likelihood(Vec2(5, 2)) == doctest::Approx(expected).epsilon(1e-12));
    }
}

TEST_CASE("contact_model_distance") {
    const KernelBandwidth bw;
    const ContactModel a = point_model(Vec3(0, 0, 0), bw);
    const ContactModel near = point_model(Vec3(0.002, 0, 0), bw);
    const ContactModel far = point_model(Vec3(0.02, 0, 0), bw);

    SUBCASE("exactly symmetric and near zero on itself") {
        CHECK(contact_model_distance(a, a, 500) == doctest::Approx(0.0).epsilon(1e-12));
        CHECK(contact_model_distance(a, far, 500) == contact_model_distance(far, a, 500));
    }

    SUBCASE("grows with separation") {
        const double dn = contact_model_distance(a, near, 1000);
        const double df = contact_model_distance(a, far, 1000);
        CHECK(dn > 0);
        CHECK(df > dn);
    }

    SUBCASE("rejects tiny sample counts") {
        CHECK_THROWS_AS(contact_model_distance(a, far, 10), std::invalid_argument);
    }
}

TEST_CASE("hand config model") {
    VecX start(2), grip(2);
    start << 0.1, 0.2;
    grip << 0.8, 0.5;
    const double alpha = 10.0, beta = 1.2, sigma = 0.05;
    const int grid = 10;

    SUBCASE("gamma grid and exponential weights") {
        const HandConfigModel m(start, grip, alpha, beta, sigma, grid);
        REQUIRE(m.gammas().size() == static_cast<size_t>(grid));
        CHECK(m.gammas().front() == doctest::Approx(-beta).epsilon(1e-12));
        CHECK(m.gammas().back() == doctest::Approx(beta).epsilon(1e-12));
        const double sep2 = (start - grip).squaredNorm();
        double z = 0;
        for (size_t i = 0; i < m.gammas().size(); ++i) {
            const double g = m.gammas()[i];
            const double w = std::exp(-alpha * g * g * sep2);
            CHECK(m.raw_weights()[i] == doctest::Approx(w).epsilon(1e-12));
            z += w;
        }
        for (size_t i = 0; i < m.weights().size(); ++i)
            CHECK(m.weights()[i] == doctest::Approx(m.raw_weights()[i] / z).epsilon(1e-12));
    }

    SUBCASE("log_eval matches a directly computed Gaussian mixture") {
        const HandConfigModel m(start, grip, alpha, beta, sigma, grid);
        VecX probe(2);
        probe << 0.65, 0.42;
        double mix = 0;
        for (size_t i = 0; i < m.gammas().size(); ++i) {
            const VecX mu = m.interpolate(m.gammas()[i]);
            mix += m.weights()[i] * std::exp(log_gaussian(probe, mu, sigma));
        }
        CHECK(m.log_eval(probe) == doctest::Approx(std::log(mix)).epsilon(1e-10));
    }

    SUBCASE("samples stay near the extrapolated closing line") {
        const HandConfigModel m(start, grip, alpha, beta, sigma, grid);
        Rng rng(43);
        const VecX dir = (start - grip).normalized();
        for (int i = 0; i < 500; ++i) {
            const VecX h = m.sample(rng);
            // Distance to the infinite line through grip along dir.
            const VecX off = h - grip;
            const VecX perp = off - off.dot(dir) * dir;
            CHECK(perp.norm() < 5 * sigma);
        }
    }

    SUBCASE("learn_hand_config_model maps trajectory endpoints") {
        const std::vector<VecX> traj = {start, 0.5 * (start + grip), grip};
        const HandConfigModel m = learn_hand_config_model(traj, alpha, beta, sigma, grid);
        CHECK((m.start_config() - start).norm() < 1e-15);
        CHECK((m.grip_config() - grip).norm() < 1e-15);
        CHECK_THROWS_AS(learn_hand_config_model({start}, alpha, beta, sigma, grid), TooShort);
    }
}

TEST_CASE("learn_grasp_model builds contacts only for touching links") {
    const KinematicHand hand;
    const Pose wrist(Vec3(0, 0, 0.2), Quat::Identity());
    // A mostly open grip keeps the fingertips far apart, so features near one
    // finger cannot also touch the others.
    VecX open = VecX::Zero(hand.dof());
    VecX closed = VecX::Constant(hand.dof(), 0.1);

    // Place features within delta of finger 0's distal link only.
    const std::vector<Pose> links = hand.forward_kinematics(wrist, closed);
    const int tip = hand.fingertip_link(0);
    Vec3 sa, sb;
    hand.link_segment(tip, links[tip], sa, sb);
    std::vector<SurfaceFeature> features;
    Rng rng(47);
    for (int i = 0; i < 5; ++i) {
        Vec3 s;
        double d;
        const Vec3 probe = 0.5 * (sa + sb) + Vec3(0, 0, -0.02);
        capsule_closest_point(sa, sb, hand.link_geometry(tip).radius, probe, s, d);
        features.push_back(make_feature(s + Vec3(0.001 * i, 0, -0.003), random_rotation(rng),
                                        Vec2(1, 0)));
    }
    // Plus one far-away feature that no link can touch.
    features.push_back(make_feature(Vec3(1, 1, 1), Quat::Identity(), Vec2(0, 0)));

    DemoGrasp demo;
    demo.features = features;
    demo.joint_trajectory = {open, 0.5 * closed, closed};
    demo.final_wrist = wrist;
    demo.final_config = closed;
    demo.grasp_type = 4;

    const GraspModel model = learn_grasp_model(demo, hand, LearnParams{});
    CHECK(model.grasp_type == 4);
    REQUIRE(!model.contacts.empty());
    for (const ContactModel& c : model.contacts) {
        // Only links of finger 0 are near the features.
        CHECK(c.link_id / hand.joints_per_finger() == 0);
        for (double d : c.distances) CHECK(d < c.delta);
    }
    CHECK((model.hand_config.grip_config() - closed).norm() < 1e-15);

    DemoGrasp hopeless = demo;
    hopeless.features = {make_feature(Vec3(5, 5, 5), Quat::Identity(), Vec2(0, 0))};
    CHECK_THROWS_AS(learn_grasp_model(hopeless, hand, LearnParams{}), NoContact);
}

TEST_CASE("cluster_contact_models groups by similarity") {
    const KernelBandwidth bw;
    std::vector<ContactModel> models;
    Rng rng(53);
    std::normal_distribution<double> jitter(0.0, 0.0005);
    for (int g = 0; g < 2; ++g)
        for (int i = 0; i < 3; ++i) {
            const Vec3 base = g == 0 ? Vec3(0, 0, 0) : Vec3(0.05, 0, 0);
            models.push_back(point_model(base + Vec3(jitter(rng), jitter(rng), jitter(rng)), bw));
        }

    ClusterOptions opts;
    opts.distance_samples = 500;
    ClusterReport report;
    const auto clusters = cluster_contact_models(models, opts, rng, &report);
    CHECK(report.converged);
    REQUIRE(clusters.size() == 2);
    for (const auto& c : clusters) {
        REQUIRE(c.member_ids.size() == 3);
        const int group = c.member_ids[0] / 3;
        for (int id : c.member_ids) CHECK(id / 3 == group);
        CHECK(c.exemplar_id / 3 == group);
        // Prototype carries the union of member kernels (3 members x 1 kernel).
        CHECK(c.prototype.kde.size() == 3);
        double sum = 0;
        for (const auto& k : c.prototype.kde.kernels()) sum += k.weight;
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
        // Prototype stays close to its members, far from the other group.
        const int other = (1 - group) * 3;
        CHECK(contact_model_distance(c.prototype, models[c.member_ids[0]], 500) <
              contact_model_distance(c.prototype, models[other], 500));
    }

    SUBCASE("prototype budget caps the kernel count") {
        ClusterOptions tight = opts;
        tight.prototype_budget = 2;
        const auto capped = cluster_contact_models(models, tight, rng);
        for (const auto& c : capped) CHECK(c.prototype.kde.size() == 2);
    }
}

TEST_CASE("grasp model save/load round-trip") {
    const KernelBandwidth bw{0.004, 80.0, 4.0};
    GraspModel model;
    model.grasp_type = 7;
    model.view_id = 3;
    model.contacts.push_back(point_model(Vec3(0.001, 0.002, 0.003), bw));
    model.contacts.push_back(point_model(Vec3(0.011, -0.002, 0.0), bw));
    VecX start(3), grip(3);
    start << 0.0, 0.1, 0.2;
    grip << 1.0, 1.1, 1.2;
    model.hand_config = HandConfigModel(start, grip, 10.0, 1.2, 0.05, 10);

    const std::string dir = (std::filesystem::temp_directory_path() / "gm_roundtrip").string();
    save_grasp_model(model, dir);
    const GraspModel loaded = load_grasp_model(dir);

    CHECK(loaded.grasp_type == 7);
    CHECK(loaded.view_id == 3);
    REQUIRE(loaded.contacts.size() == 2);
    for (size_t c = 0; c < 2; ++c) {
        const auto& a = model.contacts[c];
        const auto& b = loaded.contacts[c];
        CHECK(a.link_id == b.link_id);
        CHECK(a.lambda == b.lambda);
        CHECK(a.delta == b.delta);
        CHECK(a.distances == b.distances);
        CHECK(a.raw_weights == b.raw_weights);
        REQUIRE(a.kde.size() == b.kde.size());
        for (size_t i = 0; i < a.kde.size(); ++i) {
            CHECK(a.kde.kernels()[i].weight == b.kde.kernels()[i].weight);
            CHECK(a.kde.kernels()[i].mean.pose.p == b.kde.kernels()[i].mean.pose.p);
            CHECK(a.kde.kernels()[i].mean.pose.q.coeffs() == b.kde.kernels()[i].mean.pose.q.coeffs());
            CHECK(a.kde.kernels()[i].mean.r == b.kde.kernels()[i].mean.r);
        }
    }
    CHECK((loaded.hand_config.start_config() - start).norm() == 0.0);
    CHECK((loaded.hand_config.grip_config() - grip).norm() == 0.0);
    CHECK(loaded.hand_config.gammas().size() == 10);
    std::filesystem::remove_all(dir);
}
