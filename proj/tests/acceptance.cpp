// Acceptance gate: one criterion per invocation, one PASS/FAIL line each.
//
//   acceptance --criterion N   (N in 1..10)
//
// Exit code 0 on pass, 1 on fail, 2 on usage errors.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <memory>
#include <string>
#include <thread>
#include <vector>

#include "dexgrasp/dataset.hpp"
#include "dexgrasp/demos.hpp"
#include "dexgrasp/em/data.hpp"
#include "dexgrasp/stats.hpp"

using namespace dexgrasp;

namespace {

bool expect(bool ok, const std::string& what) {
    if (!ok) std::fprintf(stderr, "  check failed: %s\n", what.c_str());
    return ok;
}

// ---------------------------------------------------------------- criterion 1

// Transferring a model back onto its own training features must reproduce the
// demonstrated grasp: contacting-link poses of the top-ranked grasp within
// 2 sigma_p / 10 degrees for at least 8 of the 10 demo types.
bool criterion_transfer_identity() {
    const KinematicHand hand;
    const double tol_p = 2.0 * KernelBandwidth{}.sigma_p;
    const double tol_q = 10.0 * M_PI / 180.0;
    int reproduced = 0;
    for (int t = 1; t <= 10; ++t) {
        const auto type = static_cast<DemoType>(t);
        const ScriptedDemo d = scripted_demo(demo_object(type), type, hand);
        GraspModel model = learn_grasp_model(d.demo, hand, LearnParams{});
        model.grasp_type = t;
        const ObjectModel object = build_object_model(d.demo.features, KernelBandwidth{});

        Rng rng(40 + t);
        const auto ranked = generate_and_rank({model}, object, hand, GenerationConfig{}, rng);
        const Waypoint& top = ranked.front().final_waypoint();
        const auto links = hand.forward_kinematics(top.wrist, top.joints);
        const auto demo_links = hand.forward_kinematics(d.demo.final_wrist, d.demo.final_config);

        double worst_p = 0, worst_q = 0;
        for (const ContactModel& cm : model.contacts) {
            worst_p = std::max(worst_p, (links[cm.link_id].p - demo_links[cm.link_id].p).norm());
            worst_q = std::max(worst_q,
                               orientation_angle(links[cm.link_id].q, demo_links[cm.link_id].q));
        }
        const bool ok = worst_p <= tol_p && worst_q <= tol_q && !ranked.front().collided;
        std::fprintf(stderr, "  demo %2d: position %.4f m, orientation %.1f deg -> %s\n", t,
                     worst_p, worst_q * 180.0 / M_PI, ok ? "ok" : "off");
        reproduced += ok;
    }
    return expect(reproduced >= 8,
                  "top grasp reproduces the demo for " + std::to_string(reproduced) + "/10 types");
}

// ---------------------------------------------------------------- criterion 2

// Learning, transfer, and generation commute with a rigid transform of the
// scene: with the same seeds, every generated waypoint matches to 1e-6.
bool criterion_rigid_equivariance() {
    const KinematicHand hand;
    const auto type = DemoType::PowerSide;
    const ScriptedDemo base = scripted_demo(demo_object(type), type, hand);

    Rng trng(77);
    const Pose t(Vec3(0.15, -0.08, 0.2), random_rotation(trng));
    DemoGrasp moved = base.demo;
    for (SurfaceFeature& f : moved.features) f = transform_feature(t, f);
    moved.final_wrist = t.compose(base.demo.final_wrist);

    const GraspModel m1 = learn_grasp_model(base.demo, hand, LearnParams{});
    const GraspModel m2 = learn_grasp_model(moved, hand, LearnParams{});
    bool ok = expect(m1.contacts.size() == m2.contacts.size(), "same contact-model count");

    // Contact models live in feature frames, so they must be identical.
    for (size_t c = 0; ok && c < m1.contacts.size(); ++c) {
        const auto& k1 = m1.contacts[c].kde.kernels();
        const auto& k2 = m2.contacts[c].kde.kernels();
        ok &= expect(k1.size() == k2.size(), "same kernel count");
        for (size_t i = 0; ok && i < k1.size(); ++i) {
            ok &= expect((k1[i].mean.pose.p - k2[i].mean.pose.p).norm() <= 1e-9 &&
                             std::abs(k1[i].weight - k2[i].weight) <= 1e-12,
                         "contact kernels invariant");
        }
    }
    if (!ok) return false;

    const ObjectModel o1 = build_object_model(base.demo.features, KernelBandwidth{});
    const ObjectModel o2 = build_object_model(moved.features, KernelBandwidth{});
    GenerationConfig gc;
    gc.n_seeds = 40;
    gc.improve_steps = 40;
    gc.check_table = false;  // the transform does not preserve the table plane
    Rng r1(5), r2(5);
    const auto g1 = generate_and_rank({m1}, o1, hand, gc, r1);
    const auto g2 = generate_and_rank({m2}, o2, hand, gc, r2);
    ok &= expect(g1.size() == g2.size(), "same candidate count");
    if (!ok) return false;

    double worst_p = 0, worst_q = 0, worst_j = 0, worst_ll = 0;
    for (size_t i = 0; i < g1.size(); ++i) {
        for (int w = 0; w < kTrajectoryWaypoints; ++w) {
            const Waypoint& a = g1[i].waypoints[w];
            const Waypoint& b = g2[i].waypoints[w];
            const Pose expected = t.compose(a.wrist);
            worst_p = std::max(worst_p, (expected.p - b.wrist.p).norm());
            worst_q = std::max(worst_q, orientation_angle(expected.q, b.wrist.q));
            worst_j = std::max(worst_j, (a.joints - b.joints).cwiseAbs().maxCoeff());
        }
        worst_ll = std::max(worst_ll, std::abs(g1[i].log_likelihood - g2[i].log_likelihood));
    }
    std::fprintf(stderr, "  worst errors: position %.2e m, orientation %.2e rad, "
                 "joints %.2e, log-likelihood %.2e\n", worst_p, worst_q, worst_j, worst_ll);
    ok &= expect(worst_p <= 1e-6, "positions commute with the transform");
    ok &= expect(worst_q <= 1e-6, "orientations commute with the transform");
    ok &= expect(worst_j <= 1e-9, "joint draws identical");
    ok &= expect(worst_ll <= 1e-6, "objective invariant");
    return ok;
}

// ---------------------------------------------------------------- criterion 3

bool criterion_kernels_and_densities() {
    bool ok = true;

    // Position marginal integrates to one (3D quadrature, +-4 sigma).
    {
        const double sigma = 0.01;
        const Vec3 mu(0.02, -0.01, 0.005);
        const int n = 33;
        const double half = 4.0 * sigma, h = 2.0 * half / (n - 1);
        double sum = 0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int k = 0; k < n; ++k)
                    sum += std::exp(log_gaussian3(
                        mu + Vec3(-half + i * h, -half + j * h, -half + k * h), mu, sigma));
        sum *= h * h * h;
        std::fprintf(stderr, "  position marginal integral: %.4f\n", sum);
        ok &= expect(std::abs(sum - 1.0) <= 0.03, "position kernel normalizes");
    }

    // Antipodal vMF integrates to one over S^3 (polar quadrature).
    for (double kappa : {2.0, 100.0, 400.0}) {
        const int n = 200001;
        const double h = M_PI / (n - 1);
        double sum = 0;
        for (int i = 0; i < n; ++i) {
            const double theta = i * h, s = std::sin(theta);
            const double w = (i == 0 || i == n - 1) ? 0.5 : 1.0;
            sum += w * std::exp(log_vmf_pair(std::cos(theta), kappa)) * s * s;
        }
        sum *= h * 4.0 * M_PI;
        std::fprintf(stderr, "  vMF integral (kappa %.0f): %.4f\n", kappa, sum);
        ok &= expect(std::abs(sum - 1.0) <= 0.03, "orientation kernel normalizes");
    }

    // Curvature marginal (2D quadrature).
    {
        const double sigma = 2.0;
        const Vec2 mu(3.0, 1.0);
        const int n = 65;
        const double half = 5.0 * sigma, h = 2.0 * half / (n - 1);
        double sum = 0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                sum += std::exp(log_eval_curvature_kernel(
                    mu + Vec2(-half + i * h, -half + j * h), mu, sigma));
        sum *= h * h;
        std::fprintf(stderr, "  curvature marginal integral: %.4f\n", sum);
        ok &= expect(std::abs(sum - 1.0) <= 0.03, "curvature kernel normalizes");
    }

    // Sampling matches evaluation: chi-square on sampled x positions against
    // bin masses integrated from the evaluated mixture, alpha = 0.01.
    {
        Rng rng(31);
        KernelBandwidth bw;
        bw.sigma_p = 0.01;
        std::vector<Kde::Kernel> kernels;
        for (int i = 0; i < 3; ++i) {
            Kde::Kernel k;
            k.mean = SurfaceFeature(Pose(Vec3(0.03 * i, 0, 0), random_rotation(rng)),
                                    Vec2(1.0, 0.5));
            k.weight = 1.0 + i;
            kernels.push_back(k);
        }
        const Kde kde(kernels, bw);

        const int bins = 20, draws = 20000;
        const double lo = -0.04, hi = 0.10, width = (hi - lo) / bins;
        std::vector<int> observed(bins, 0);
        int inside = 0;
        for (int i = 0; i < draws; ++i) {
            const double x = kde.sample(rng).pose.p.x();
            if (x < lo || x >= hi) continue;
            ++observed[static_cast<int>((x - lo) / width)];
            ++inside;
        }
        // Expected bin mass from the x marginal (mixture of 1D Gaussians).
        std::vector<double> expected(bins, 0.0);
        double total = 0;
        for (int b = 0; b < bins; ++b) {
            const int steps = 50;
            double mass = 0;
            for (int s = 0; s < steps; ++s) {
                const double x = lo + (b + (s + 0.5) / steps) * width;
                double density = 0;
                for (const auto& k : kde.kernels())
                    density += k.weight *
                               std::exp(-0.5 * std::pow((x - k.mean.pose.p.x()) / bw.sigma_p, 2)) /
                               (bw.sigma_p * std::sqrt(2.0 * M_PI));
                mass += density * width / steps;
            }
            expected[b] = mass;
            total += mass;
        }
        double chi2 = 0;
        for (int b = 0; b < bins; ++b) {
            const double e = inside * expected[b] / total;
            if (e < 1e-9) continue;
            chi2 += (observed[b] - e) * (observed[b] - e) / e;
        }
        const double critical = 36.191;  // chi-square 0.99 quantile, 19 dof
        std::fprintf(stderr, "  sampling GOF: chi2 %.1f vs critical %.1f (19 dof)\n", chi2,
                     critical);
        ok &= expect(chi2 <= critical, "KDE sampling matches evaluation");
    }

    // Hill climbing is monotone: chained improvement never lowers the score.
    {
        const KinematicHand hand;
        const auto type = DemoType::TripodTop;
        const ScriptedDemo d = scripted_demo(demo_object(type), type, hand);
        const GraspModel model = learn_grasp_model(d.demo, hand, LearnParams{});
        const ObjectModel object = build_object_model(d.demo.features, KernelBandwidth{});
        Rng rng(7);
        TransferOptions topt;
        topt.kq = 200;
        const auto batch = query_density_batch(model, object, topt, rng);
        const Objective objective = [&](const Pose& h_w, const VecX& h_c) {
            return poe_objective(h_w, h_c, batch.densities, model.hand_config, hand);
        };
        GenerationConfig gc;
        auto seeds = generate_candidates(model, batch.densities, 5, hand, rng);
        bool monotone = true;
        for (Grasp g : seeds) {
            double last = g.log_likelihood;
            for (int chunk = 0; chunk < 20; ++chunk) {
                g = improve_grasp(g, objective, 10, gc, rng);
                monotone &= g.log_likelihood >= last;
                last = g.log_likelihood;
            }
        }
        ok &= expect(monotone, "hill-climb objective monotone per accepted step");
    }
    return ok;
}

// ---------------------------------------------------------------- criterion 4

bool criterion_oracle_cases() {
    const AnalyticObject sphere = make_sphere(0.03);
    const Vec3 com = sphere.com();
    const OracleConfig cfg;
    bool ok = true;

    const auto antipodal = [&] {
        Contact a, b;
        a.point = com + Vec3(0.03, 0, 0);
        a.normal = Vec3::UnitX();
        b.point = com - Vec3(0.03, 0, 0);
        b.normal = -Vec3::UnitX();
        return std::vector<Contact>{a, b};
    }();

    ok &= expect(force_closure(antipodal, com, 1.0, cfg.cone_edges, cfg.torsion),
                 "antipodal sphere grasp closes");
    ok &= expect(supports_gravity(antipodal, com, 1.0, cfg.cone_edges, 0.05, cfg),
                 "antipodal sphere grasp lifts 50 g");
    for (double mu : {0.3, 1.0})
        ok &= expect(!force_closure({antipodal[0]}, com, mu, cfg.cone_edges, cfg.torsion),
                     "single contact never closes");

    // Friction monotonicity on three equatorial contacts.
    std::vector<Contact> tripod;
    for (int k = 0; k < 3; ++k) {
        const double th = 2 * M_PI * k / 3;
        Contact c;
        c.normal = Vec3(std::cos(th), std::sin(th), 0);
        c.point = com + 0.03 * c.normal;
        tripod.push_back(c);
    }
    bool closed_before = false;
    for (double mu = 0.05; mu <= 1.0; mu += 0.05) {
        const bool closed = force_closure(tripod, com, mu, cfg.cone_edges, cfg.torsion);
        if (closed_before) ok &= expect(closed, "closure monotone in friction");
        closed_before = closed;
    }
    ok &= expect(closed_before, "tripod closes at mu = 1");

    // Rigid invariance across random transforms.
    Rng rng(13);
    for (int trial = 0; trial < 20; ++trial) {
        const Pose t(0.3 * Vec3::Random(), random_rotation(rng));
        std::vector<Contact> moved;
        for (const Contact& c : antipodal) {
            Contact m;
            m.point = t.apply(c.point);
            m.normal = t.q * c.normal;
            moved.push_back(m);
        }
        ok &= expect(force_closure(moved, t.apply(com), 1.0, cfg.cone_edges, cfg.torsion) ==
                         force_closure(antipodal, com, 1.0, cfg.cone_edges, cfg.torsion),
                     "force closure invariant under rigid transform");
    }
    return ok;
}

// ---------------------------------------------------------------- criterion 5

em::EvalNetConfig tiny_net(uint64_t seed) {
    em::EvalNetConfig cfg;
    cfg.vis_channels = {2};
    cfg.traj_channels = {8};
    cfg.vis_features = 16;
    cfg.traj_features = 16;
    cfg.fused_features = 16;
    cfg.dropout = 0.0;
    cfg.init_seed = seed;
    return cfg;
}

std::vector<em::Sample> toy_samples(int n, std::shared_ptr<em::Tensor> image, Rng& rng,
                                    bool shuffle_labels = false) {
    std::vector<em::Sample> out;
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int i = 0; i < n; ++i) {
        std::vector<Waypoint> wps;
        const double z = u(rng);
        for (int s = 0; s < em::kWaypoints; ++s) {
            Waypoint w;
            w.wrist = Pose(Vec3(0.1 * u(rng), 0.1 * u(rng), z), Quat::Identity());
            w.joints = VecX::Constant(9, 0.3);
            wps.push_back(w);
        }
        em::Sample sample;
        sample.image = image;
        sample.trajectory = em::encode_trajectory(wps, Pose::identity(), 1);
        sample.label = z > 0 ? 1 : 0;
        out.push_back(std::move(sample));
    }
    if (shuffle_labels) {
        std::vector<int> labels;
        for (const em::Sample& s : out) labels.push_back(s.label);
        std::shuffle(labels.begin(), labels.end(), rng);
        for (size_t i = 0; i < out.size(); ++i) out[i].label = labels[i];
    }
    return out;
}

bool criterion_evaluator() {
    bool ok = true;

    // Loss spot value.
    ok &= expect(std::abs(em::cross_entropy(0.5, 1) - 0.6931) <= 1e-4,
                 "-log 0.5 spot value");

    // Analytic vs finite-difference parameter gradients on a 3-sample batch.
    {
        em::EvalNet net{tiny_net(3)};
        Rng rng(7);
        std::vector<std::shared_ptr<em::Tensor>> imgs;
        std::vector<std::vector<double>> trajs;
        const std::vector<int> labels = {1, 0, 1};
        std::uniform_real_distribution<double> u(0.0, 1.0);
        std::normal_distribution<double> g(0.0, 0.5);
        for (int i = 0; i < 3; ++i) {
            auto img = std::make_shared<em::Tensor>(
                std::vector<int>{em::kImageChannels, em::kImageSize, em::kImageSize});
            for (double& v : img->data) v = u(rng);
            imgs.push_back(img);
            std::vector<double> t(em::kTrajectoryDim, 0.0);
            for (int k = 0; k < em::kWaypoints * kWaypointFloats; ++k) t[k] = g(rng);
            t[em::kWaypoints * kWaypointFloats + i] = 1.0;
            trajs.push_back(t);
        }
        const auto batch_loss = [&] {
            double sum = 0;
            for (int i = 0; i < 3; ++i) sum += net.sample_loss(*imgs[i], trajs[i], labels[i]);
            return sum;
        };
        net.zero_grad();
        Rng drng(0);
        for (int i = 0; i < 3; ++i) net.sample_loss_and_grad(*imgs[i], trajs[i], labels[i], drng);
        const std::vector<double> analytic = net.snapshot_grads();
        const std::vector<double> params = net.snapshot_params();

        Rng pick(11);
        const double eps = 1e-4;
        double max_rel = 0;
        for (size_t i = 0; i < params.size(); i += 1 + pick() % 37) {
            std::vector<double> mod = params;
            mod[i] = params[i] + eps;
            net.restore_params(mod);
            const double up = batch_loss();
            mod[i] = params[i] - eps;
            net.restore_params(mod);
            const double dn = batch_loss();
            const double numeric = (up - dn) / (2 * eps);
            const double denom = std::max({std::abs(numeric), std::abs(analytic[i]), 1e-4});
            max_rel = std::max(max_rel, std::abs(numeric - analytic[i]) / denom);
        }
        net.restore_params(params);
        std::fprintf(stderr, "  gradient check: max relative error %.2e\n", max_rel);
        ok &= expect(max_rel <= 1e-3, "analytic gradients match finite differences");
    }

    // Separable toy task + shuffled-label control.
    {
        Rng rng(17);
        auto img = std::make_shared<em::Tensor>(
            std::vector<int>{em::kImageChannels, em::kImageSize, em::kImageSize});
        const auto train_set = toy_samples(240, img, rng);
        const auto val_set = toy_samples(80, img, rng);
        const auto test_set = toy_samples(80, img, rng);

        em::EvalNetConfig ncfg = tiny_net(21);
        ncfg.dropout = 0.2;
        em::EvalNet net{ncfg};
        em::TrainConfig tcfg;
        tcfg.max_epochs = 30;
        tcfg.batch = 16;
        em::train(net, train_set, val_set, tcfg, rng);
        const double acc = em::predict_metrics(net, test_set).accuracy();
        std::fprintf(stderr, "  toy task held-out accuracy: %.3f\n", acc);
        ok &= expect(acc >= 0.95, "separable toy task learned within 30 epochs");

        Rng rng2(18);
        const auto shuffled_train = toy_samples(240, img, rng2, true);
        const auto shuffled_test = toy_samples(80, img, rng2, true);
        em::EvalNet control{tiny_net(22)};
        em::TrainConfig ccfg = tcfg;
        ccfg.max_epochs = 10;
        em::train(control, shuffled_train, val_set, ccfg, rng2);
        const double chance = em::predict_metrics(control, shuffled_test).accuracy();
        std::fprintf(stderr, "  shuffled-label control accuracy: %.3f\n", chance);
        ok &= expect(chance >= 0.35 && chance <= 0.65, "shuffled-label control at chance");
    }
    return ok;
}

// ---------------------------------------------------------------- criterion 6

bool criterion_ranking_improvement() {
    const KinematicHand hand;
    std::vector<GraspModel> models;
    for (int t = 1; t <= 10; ++t) {
        const auto type = static_cast<DemoType>(t);
        const ScriptedDemo d = scripted_demo(demo_object(type), type, hand);
        GraspModel m = learn_grasp_model(d.demo, hand, LearnParams{});
        m.grasp_type = t;
        models.push_back(std::move(m));
    }

    DatasetConfig cfg;
    cfg.objects = standard_objects();
    cfg.models = models;
    cfg.scenes = 50;
    cfg.grasps_per_scene = 50;
    cfg.views = 1;
    cfg.seed = 11;
    cfg.jobs = std::max(1u, std::thread::hardware_concurrency());
    std::vector<SceneRecord> scenes;
    const DatasetSplit split = generate_dataset(cfg, hand, &scenes);
    std::fprintf(stderr, "  dataset: %d scenes x %d grasps, %d/%d successes, %zu excluded\n",
                 cfg.scenes, cfg.grasps_per_scene, split.stats.total_success,
                 split.stats.total_success + split.stats.total_failure, split.excluded.size());

    const CameraIntrinsics intrinsics;
    std::vector<em::Sample> train_set, val_set;
    for (int id : split.train)
        for (auto& s : em::scene_samples(scenes[id], intrinsics)) train_set.push_back(s);
    for (int id : split.validation)
        for (auto& s : em::scene_samples(scenes[id], intrinsics)) val_set.push_back(s);

    em::EvalNet net;
    em::TrainConfig tc;
    tc.max_epochs = 20;
    Rng rng(99);
    em::train(net, train_set, val_set, tc, rng);

    int n = 0, gm_top = 0, em_top = 0, opt_top = 0;
    std::vector<em::RankedResult> gm_results, em_results, opt_results;
    for (const SceneRecord& s : scenes) {
        if (s.grasps.empty()) continue;
        const em::SceneEval ev = em::scene_eval_inputs(s, intrinsics);
        ++n;
        auto gm = em::rank_by(ev.grasps, em::RankSource::GM);
        auto emr = em::rerank(ev.grasps, net, *ev.image, ev.camera);
        auto opt = em::rank_by(ev.grasps, em::RankSource::Optimal);
        gm_top += gm.grasps.front().success;
        em_top += emr.grasps.front().success;
        opt_top += opt.grasps.front().success;
        gm_results.push_back(std::move(gm));
        em_results.push_back(std::move(emr));
        opt_results.push_back(std::move(opt));
    }
    const double gm_rate = double(gm_top) / n, em_rate = double(em_top) / n;
    std::fprintf(stderr, "  top-1 success: generative %d/%d (%.1f%%), evaluative %d/%d (%.1f%%), "
                 "optimal %d/%d\n", gm_top, n, 100 * gm_rate, em_top, n, 100 * em_rate, opt_top, n);

    bool ok = expect(em_rate >= gm_rate + 0.05,
                     "evaluative re-ranking beats generative ranking by >= 5 points");

    // Success-vs-rank: the optimal curve dominates both at the top rank and in
    // area over the first ten ranks.
    const int max_rank = 10;
    const em::RankCurves gm_curves = em::success_vs_rank(gm_results, max_rank);
    const em::RankCurves em_curves = em::success_vs_rank(em_results, max_rank);
    double auc_gm = 0, auc_em = 0, auc_opt = 0;
    for (int r = 0; r < max_rank; ++r) {
        auc_gm += gm_curves.ranked[r];
        auc_em += em_curves.ranked[r];
        auc_opt += em_curves.optimal[r];
        std::fprintf(stderr, "  rank %2d: gm %.2f  em %.2f  optimal %.2f\n", r + 1,
                     gm_curves.ranked[r], em_curves.ranked[r], em_curves.optimal[r]);
    }
    ok &= expect(em_curves.optimal[0] >= em_curves.ranked[0] &&
                     em_curves.optimal[0] >= gm_curves.ranked[0],
                 "optimal curve dominates at rank 1");
    ok &= expect(auc_opt >= auc_em && auc_opt >= auc_gm,
                 "optimal curve dominates both in area");
    return ok;
}

// ---------------------------------------------------------------- criterion 7

// Independent enumeration oracle: hypergeometric masses via a multiplicative
// recurrence, no factorials.
double fisher_oracle(long long a, long long b, long long c, long long d) {
    const long long r1 = a + b, r2 = c + d, c1 = a + c;
    const long long lo = std::max(0LL, c1 - r2), hi = std::min(r1, c1);
    std::vector<double> mass;
    double cur = 1.0, total = 0;
    for (long long k = lo; k <= hi; ++k) {
        if (k > lo)
            cur *= static_cast<double>((r1 - (k - 1)) * (c1 - (k - 1))) /
                   (static_cast<double>(k) * (r2 - c1 + k));
        mass.push_back(cur);
        total += cur;
    }
    const double observed = mass[a - lo];
    double p = 0;
    for (double m : mass)
        if (m <= observed * (1 + 1e-9)) p += m;
    return std::min(1.0, p / total);
}

bool criterion_exact_tests() {
    bool ok = true;

    Rng rng(23);
    std::uniform_int_distribution<long long> cell(0, 40);
    for (int i = 0; i < 20; ++i) {
        const long long a = cell(rng), b = cell(rng), c = cell(rng), d = cell(rng);
        if (a + b == 0 || c + d == 0) continue;
        const double mine = fisher_exact({{{a, b}, {c, d}}});
        const double ref = fisher_oracle(a, b, c, d);
        if (std::abs(mine - ref) > 1e-10) {
            std::fprintf(stderr, "  table [[%lld,%lld],[%lld,%lld]]: %.12g vs oracle %.12g\n", a,
                         b, c, d, mine, ref);
            ok = false;
        }
    }
    ok &= expect(ok, "fisher_exact matches the enumeration oracle to 1e-10");

    const double p = fisher_exact({{{1070, 469}, {894, 94}}});
    std::fprintf(stderr, "  variant comparison p-value: %.6e\n", p);
    ok &= expect(std::abs(p - fisher_oracle(1070, 469, 894, 94)) <= 1e-10 && p < 1e-10,
                 "headline table p-value reported and vanishingly small");

    ok &= expect(std::abs(mcnemar(10, 0) - 0.001953125) <= 1e-12, "mcnemar(10,0) closed form");
    ok &= expect(std::abs(mcnemar(2, 8) - 2.0 * (1 + 10 + 45) / 1024.0) <= 1e-12,
                 "mcnemar(2,8) closed form");
    ok &= expect(mcnemar(0, 0) == 1.0, "mcnemar(0,0) is 1");
    return ok;
}

// ---------------------------------------------------------------- criterion 8

bool criterion_reported_counts() {
    const em::Metrics m = em::metrics_from_counts(37840, 12226, 39211, 10244);
    const double acc = 100.0 * m.accuracy();
    std::fprintf(stderr, "  confusion-count accuracy: %.4f%%\n", acc);
    bool ok = expect(std::abs(acc - 77.42) <= 0.01, "confusion counts give 77.42%");

    const double rate = 100.0 * 1070.0 / (1070.0 + 469.0);
    std::fprintf(stderr, "  top-1 success rate: %.4f%%\n", rate);
    ok &= expect(std::abs(rate - 69.53) <= 0.01, "success counts give 69.53%");
    return ok;
}

// ---------------------------------------------------------------- criterion 9

bool criterion_dataset_roundtrip() {
    const KinematicHand hand;
    const ScriptedDemo d = scripted_demo(make_cylinder(0.02, 0.06), DemoType::PowerSide, hand);
    const GraspModel model = learn_grasp_model(d.demo, hand, LearnParams{});

    DatasetConfig cfg;
    cfg.objects = {make_cylinder(0.02, 0.06), make_sphere(0.035)};
    cfg.models = {model};
    cfg.scenes = 4;
    cfg.grasps_per_scene = 6;
    cfg.views = 2;
    cfg.seed = 7;
    cfg.generation.n_seeds = 20;
    cfg.generation.improve_steps = 30;
    cfg.generation.kq = 150;
    const auto root = std::filesystem::temp_directory_path() / "dexgrasp_acceptance_ds";
    std::filesystem::remove_all(root);
    cfg.out_dir = root.string();

    std::vector<SceneRecord> scenes;
    const DatasetSplit split = generate_dataset(cfg, hand, &scenes);

    bool ok = true;
    // Persisted scenes reload bit-exactly.
    for (const SceneRecord& orig : scenes) {
        char name[32];
        std::snprintf(name, sizeof(name), "scene_%04d", orig.id);
        const SceneRecord back = load_scene((root / name).string());
        ok &= back.grasps.size() == orig.grasps.size();
        for (size_t i = 0; ok && i < back.grasps.size(); ++i) {
            const Waypoint& a = back.grasps[i].waypoints.back();
            const Waypoint& b = orig.grasps[i].waypoints.back();
            ok &= back.grasps[i].success == orig.grasps[i].success &&
                  a.wrist.p == b.wrist.p && a.wrist.q.coeffs() == b.wrist.q.coeffs() &&
                  a.joints.head(hand.dof()) == b.joints.head(hand.dof());
        }
    }
    ok = expect(ok, "persisted scenes reload bit-exactly");

    const ReplayResult replay = replay_dataset(root.string(), hand, cfg.oracle);
    std::fprintf(stderr, "  replay: %d/%d labels reproduced\n", replay.matched, replay.total);
    ok &= expect(replay.total > 0 && replay.matched == replay.total,
                 "replay reproduces every stored label");

    const DatasetStats fresh = compute_stats(scenes);
    const DatasetSplit loaded = load_manifest(root.string());
    ok &= expect(fresh.scenes == loaded.stats.scenes &&
                     fresh.top_success == loaded.stats.top_success &&
                     fresh.top_failure == loaded.stats.top_failure &&
                     fresh.total_success == loaded.stats.total_success &&
                     fresh.total_failure == loaded.stats.total_failure,
                 "manifest statistics equal recomputed statistics");
    ok &= expect(split.train == loaded.train && split.excluded == loaded.excluded,
                 "splits reload unchanged");
    std::filesystem::remove_all(root);
    return ok;
}

// --------------------------------------------------------------- criterion 10

/// Deterministic pseudo-random score over the encoding contents.
struct HashScorer : em::TrajectoryScorer {
    double score(const std::vector<double>& enc) override {
        double acc = 0;
        for (size_t i = 0; i < enc.size(); ++i) acc += std::sin(37.0 * enc[i] + i);
        return 0.5 + 0.4 * std::sin(acc);
    }
    std::vector<double> gradient(const std::vector<double>& enc) override {
        std::vector<double> g(enc.size(), 0.0), mod = enc;
        const double eps = 1e-6;
        for (size_t i = 0; i < enc.size(); ++i) {
            mod[i] = enc[i] + eps;
            const double up = score(mod);
            mod[i] = enc[i] - eps;
            g[i] = (up - score(mod)) / (2 * eps);
            mod[i] = enc[i];
        }
        return g;
    }
};

GraspTrajectory random_trajectory(Rng& rng) {
    std::uniform_real_distribution<double> u(-0.2, 0.2);
    GraspTrajectory g;
    g.grasp_type = 1 + static_cast<int>(rng() % 10);
    for (int i = 0; i < kTrajectoryWaypoints; ++i) {
        Waypoint w;
        w.wrist = Pose(Vec3(u(rng), u(rng), 0.4 - 0.02 * i), random_rotation(rng));
        w.joints = VecX::Constant(9, 0.1 + 0.05 * i) + 0.1 * VecX::Random(9);
        g.waypoints.push_back(w);
    }
    return g;
}

bool criterion_refinement_contracts() {
    const Pose camera(Vec3(0, 0, 1), Quat(Eigen::AngleAxisd(M_PI, Vec3::UnitX())));
    bool ok = true;

    // Best-so-far on 1000 random starts, both refiner families.
    {
        Rng rng(41);
        HashScorer scorer;
        em::RefineConfig ga;
        ga.method = em::RefineMethod::GA3;
        ga.ga_iterations = 10;
        em::RefineConfig sa;
        sa.method = em::RefineMethod::SA3;
        sa.sa_iterations = 2;
        sa.sa_perturbations = 10;
        bool monotone = true, consistent = true;
        for (int trial = 0; trial < 1000; ++trial) {
            const GraspTrajectory g = random_trajectory(rng);
            const em::RefineResult rg = em::refine_ga(g, scorer, camera, ga);
            Rng srng(5000 + trial);
            const em::RefineResult rs = em::refine_sa(g, scorer, camera, sa, nullptr, srng);
            monotone &= rg.best_score >= rg.initial_score - 1e-12;
            monotone &= rs.best_score >= rs.initial_score - 1e-12;
            // The returned trajectory scores exactly its reported best.
            for (const em::RefineResult* r : {&rg, &rs}) {
                const auto enc =
                    em::encode_trajectory(r->grasp.waypoints, camera, r->grasp.grasp_type);
                consistent &= std::abs(scorer.score(enc) - r->best_score) <= 1e-9;
            }
        }
        ok &= expect(monotone, "refined score never below the initial score (1000 starts)");
        ok &= expect(consistent, "returned trajectory scores its reported best");
    }

    // Metropolis acceptance rate at fixed temperature.
    {
        const double delta = 0.15;
        struct Scripted : em::TrajectoryScorer {
            double delta;
            bool first = true;
            double score(const std::vector<double>&) override {
                if (first) {
                    first = false;
                    return 1.0;
                }
                return 1.0 - delta;
            }
        };
        em::RefineConfig cfg;
        cfg.method = em::RefineMethod::SA1;
        cfg.sa_iterations = 1;
        cfg.sa_perturbations = 1;
        Rng grng(3);
        const GraspTrajectory g = random_trajectory(grng);
        const int trials = 10000;
        int accepted = 0;
        for (int t = 0; t < trials; ++t) {
            Scripted scorer;
            scorer.delta = delta;
            Rng rng(1000 + t);
            accepted += em::refine_sa(g, scorer, camera, cfg, nullptr, rng).accepted;
        }
        const double expected = std::exp(-delta / cfg.sa_t0);
        const double sigma = std::sqrt(expected * (1 - expected) / trials);
        const double rate = accepted / double(trials);
        std::fprintf(stderr, "  acceptance rate %.4f vs exp(-delta/T) %.4f (3 sigma %.4f)\n",
                     rate, expected, 3 * sigma);
        ok &= expect(std::abs(rate - expected) <= 3 * sigma,
                     "Metropolis acceptance within 3 sigma of exp(-delta/T)");
    }

    // Colliding perturbations are rejected before any evaluation.
    {
        struct Counting : em::TrajectoryScorer {
            int calls = 0;
            double score(const std::vector<double>&) override {
                ++calls;
                return 0.5;
            }
        } scorer;
        em::RefineConfig cfg;
        cfg.method = em::RefineMethod::SA1;
        int rejected = 0;
        const em::CollisionCheck always = [&](const std::vector<Waypoint>&) {
            ++rejected;
            return true;
        };
        Rng grng(4), rng(5);
        const GraspTrajectory g = random_trajectory(grng);
        const em::RefineResult r = em::refine_sa(g, scorer, camera, cfg, always, rng);
        ok &= expect(scorer.calls == 1 && r.evaluations == 1,
                     "colliding perturbations never reach the scorer");
        ok &= expect(rejected == cfg.sa_stall_limit * cfg.sa_perturbations,
                     "every perturbation went through the collision check");
    }
    return ok;
}

}  // namespace

int main(int argc, char** argv) {
    int criterion = 0;
    for (int i = 1; i + 1 < argc + 1; ++i)
        if (i + 1 < argc && std::strcmp(argv[i], "--criterion") == 0)
            criterion = std::atoi(argv[i + 1]);
    if (criterion < 1 || criterion > 10) {
        std::fprintf(stderr, "usage: acceptance --criterion N   (N in 1..10)\n");
        return 2;
    }

    struct Entry {
        const char* name;
        bool (*run)();
    };
    const Entry table[10] = {
        {"transfer identity", criterion_transfer_identity},
        {"rigid equivariance", criterion_rigid_equivariance},
        {"kernel and density correctness", criterion_kernels_and_densities},
        {"oracle truth cases", criterion_oracle_cases},
        {"evaluator correctness", criterion_evaluator},
        {"evaluative re-ranking beats generative ranking", criterion_ranking_improvement},
        {"exact tests vs enumeration", criterion_exact_tests},
        {"reported-counts arithmetic", criterion_reported_counts},
        {"dataset round trip", criterion_dataset_roundtrip},
        {"refinement contracts", criterion_refinement_contracts},
    };

    const auto t0 = std::chrono::steady_clock::now();
    const bool ok = table[criterion - 1].run();
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("criterion %d (%s): %s [%.1fs]\n", criterion, table[criterion - 1].name,
                ok ? "PASS" : "FAIL", secs);
    return ok ? 0 : 1;
}
