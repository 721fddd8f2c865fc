#include "dexgrasp/oracle.hpp"

#include <cmath>

#include "dexgrasp/lp.hpp"

namespace dexgrasp {

std::vector<Contact> extract_contacts(const AnalyticObject& object, const KinematicHand& hand,
                                      const Pose& h_w, const VecX& h_c, double tol,
                                      double* max_penetration) {
    const std::vector<Pose> links = hand.forward_kinematics(h_w, h_c);
    std::vector<Contact> contacts;
    double worst = 0;
    for (int link = 0; link < hand.num_links(); ++link) {
        Vec3 a, b;
        hand.link_segment(link, links[link], a, b);
        const double radius = hand.link_geometry(link).radius;

        double best_gap = std::numeric_limits<double>::infinity();
        Vec3 best_axis = a;
        const int samples = 9;
        for (int s = 0; s < samples; ++s) {
            const Vec3 p = a + (b - a) * (static_cast<double>(s) / (samples - 1));
            const double gap = object.sdf(p) - radius;
            if (gap < best_gap) {
                best_gap = gap;
                best_axis = p;
            }
        }
        worst = std::min(worst, best_gap);
        if (best_gap >= tol) continue;

        Contact c;
        const double d = object.sdf(best_axis);
        c.normal = object.normal(best_axis);
        c.point = best_axis - d * c.normal;
        c.link = link;
        contacts.push_back(c);
    }
    if (max_penetration) *max_penetration = std::max(0.0, -worst);
    return contacts;
}

std::vector<Vec3> friction_cone_edges(const Vec3& normal, double mu, int edges) {
    Vec3 t1, t2;
    tangent_basis(normal, t1, t2);
    std::vector<Vec3> out;
    out.reserve(edges);
    for (int k = 0; k < edges; ++k) {
        const double theta = 2.0 * M_PI * k / edges;
        out.push_back((-normal + mu * (std::cos(theta) * t1 + std::sin(theta) * t2)).normalized());
    }
    return out;
}

namespace {

// All primitive contact wrenches (force, torque about com): one per cone edge
// plus two soft-finger torsion extremes (+/- torsion * normal force about the
// contact normal) per contact.
std::vector<Eigen::Matrix<double, 6, 1>> contact_wrenches(const std::vector<Contact>& contacts,
                                                          const Vec3& com, double mu, int edges,
                                                          double torsion) {
    std::vector<Eigen::Matrix<double, 6, 1>> ws;
    for (const Contact& c : contacts) {
        for (const Vec3& f : friction_cone_edges(c.normal, mu, edges)) {
            Eigen::Matrix<double, 6, 1> w;
            w.head<3>() = f;
            w.tail<3>() = (c.point - com).cross(f);
            ws.push_back(w);
        }
        for (const double sign : {1.0, -1.0}) {
            Eigen::Matrix<double, 6, 1> w;
            w.head<3>() = -c.normal;
            w.tail<3>() = (c.point - com).cross(-c.normal) + sign * torsion * c.normal;
            ws.push_back(w);
        }
    }
    return ws;
}

constexpr int generators_per_contact(int edges) { return edges + 2; }

}  // namespace

bool force_closure(const std::vector<Contact>& contacts, const Vec3& com, double mu, int edges,
                   double torsion) {
    const auto ws = contact_wrenches(contacts, com, mu, edges, torsion);
    const int n = static_cast<int>(ws.size());
    if (n < 7) return false;

    // Interior requires the wrenches to span all of R^6.
    MatX W(6, n);
    for (int j = 0; j < n; ++j) W.col(j) = ws[j];
    const Eigen::JacobiSVD<MatX> svd(W);
    if (svd.singularValues()(5) < 1e-8 * svd.singularValues()(0)) return false;

    // max eps  s.t.  sum lambda_j w_j = 0, sum lambda_j = 1, lambda_j >= eps.
    // Substituting lambda_j = eps + s_j (s_j >= 0, eps >= 0) gives a standard
    // form LP in (eps, s).
    const int vars = 1 + n;
    MatX A(7, vars);
    VecX b(7), c(vars);
    c.setZero();
    c(0) = 1.0;
    for (int r = 0; r < 6; ++r) {
        double wsum = 0;
        for (int j = 0; j < n; ++j) {
            A(r, 1 + j) = ws[j](r);
            wsum += ws[j](r);
        }
        A(r, 0) = wsum;
        b(r) = 0;
    }
    A(6, 0) = n;
    for (int j = 0; j < n; ++j) A(6, 1 + j) = 1.0;
    b(6) = 1.0;

    const LpResult lp = solve_lp(A, b, c);
    return lp.feasible && lp.bounded && lp.objective > 1e-8;
}

bool supports_gravity(const std::vector<Contact>& contacts, const Vec3& com, double mu,
                      int edges, double mass_kg, const OracleConfig& config) {
    const auto ws = contact_wrenches(contacts, com, mu, edges, config.torsion);
    const int n = static_cast<int>(ws.size());
    if (n == 0) return false;
    const int m = static_cast<int>(contacts.size());
    const int per = generators_per_contact(edges);

    // Feasibility: sum lambda_j w_j = g_wrench with per-contact force budgets.
    // Gravity acts at com, so its torque about com vanishes; the contacts must
    // supply an upward force of safety_factor * m * g.
    Eigen::Matrix<double, 6, 1> g_wrench = Eigen::Matrix<double, 6, 1>::Zero();
    g_wrench(2) = config.safety_factor * mass_kg * config.gravity;

    // Budget rows: sum of lambda within contact i plus slack = max force.
    const int vars = n + m;
    MatX A(6 + m, vars);
    A.setZero();
    VecX b(6 + m), c(vars);
    c.setZero();
    for (int r = 0; r < 6; ++r) {
        for (int j = 0; j < n; ++j) A(r, j) = ws[j](r);
        b(r) = g_wrench(r);
    }
    for (int i = 0; i < m; ++i) {
        for (int k = 0; k < per; ++k) A(6 + i, i * per + k) = 1.0;
        A(6 + i, n + i) = 1.0;  // slack
        b(6 + i) = config.max_contact_force;
    }

    const LpResult lp = solve_lp(A, b, c);
    return lp.feasible;
}

OracleReport grasp_outcome_oracle(const AnalyticObject& object, const PhysicsDraw& physics,
                                  const Pose& h_w, const VecX& h_c, const KinematicHand& hand,
                                  const OracleConfig& config) {
    OracleReport report;
    report.contacts = extract_contacts(object, hand, h_w, h_c, config.contact_tol,
                                       &report.max_penetration);
    report.penetrated = report.max_penetration > config.penetration_limit;
    if (report.penetrated || report.contacts.empty()) return report;

    const Vec3 com = object.com();
    report.force_closure = force_closure(report.contacts, com, physics.friction,
                                         config.cone_edges, config.torsion);
    if (!report.force_closure) return report;

    report.gravity_ok = supports_gravity(report.contacts, com, physics.friction,
                                         config.cone_edges, physics.mass_grams / 1000.0, config);
    report.success = report.gravity_ok;
    return report;
}

namespace {

bool hand_below_table(const KinematicHand& hand, const Pose& h_w, const VecX& h_c,
                      double table_z) {
    const std::vector<Pose> links = hand.forward_kinematics(h_w, h_c);
    for (int i = 0; i < hand.num_links(); ++i) {
        Vec3 a, b;
        hand.link_segment(i, links[i], a, b);
        if (std::min(a.z(), b.z()) - hand.link_geometry(i).radius < table_z) return true;
    }
    return false;
}

}  // namespace

ExecutedGrasp execute_grasp(const AnalyticObject& object, const KinematicHand& hand,
                            const Pose& h_w, const VecX& open_config, const OracleConfig& oracle,
                            const ExecutionConfig& exec) {
    ExecutedGrasp out{h_w, hand.clamp_config(open_config)};
    const auto blocked = [&](const Pose& w, const VecX& c) {
        double pen = 0;
        extract_contacts(object, hand, w, c, oracle.contact_tol, &pen);
        return pen > oracle.penetration_limit || hand_below_table(hand, w, c, exec.table_z);
    };

    // The approach would have stopped short of a blocked commanded pose, so
    // back off first, then advance as deep as the object and table allow.
    const Vec3 approach = out.h_w.q * Vec3::UnitZ();
    for (double moved = 0; blocked(out.h_w, out.h_c) && moved + exec.advance_step <= exec.retreat_max;
         moved += exec.advance_step)
        out.h_w.p -= exec.advance_step * approach;
    if (blocked(out.h_w, out.h_c)) return out;
    for (double moved = 0; moved + exec.advance_step <= exec.advance_max;
         moved += exec.advance_step) {
        Pose trial = out.h_w;
        trial.p += exec.advance_step * approach;
        if (blocked(trial, out.h_c)) break;
        out.h_w = trial;
    }

    const int J = hand.joints_per_finger();
    const double hi = hand.config().joint_hi;
    for (int f = 0; f < hand.fingers(); ++f) {
        int moving = 0;  // joints below this index are locked (breakaway)
        while (moving < J) {
            VecX trial = out.h_c;
            bool can_move = false;
            for (int j = moving; j < J; ++j) {
                double& v = trial[f * J + j];
                const double next = std::min(hi, v + exec.close_step);
                if (next != v) can_move = true;
                v = next;
            }
            if (!can_move) break;
            if (blocked(out.h_w, trial)) {
                ++moving;
                continue;
            }
            out.h_c = trial;
            double pen = 0;
            const auto contacts =
                extract_contacts(object, hand, out.h_w, out.h_c, oracle.contact_tol, &pen);
            int deepest = -1;
            for (const Contact& c : contacts)
                if (c.link / J == f) deepest = std::max(deepest, c.link % J);
            if (deepest == J - 1) break;  // fingertip touching: finger done
            if (deepest >= moving) moving = deepest + 1;
        }
    }
    return out;
}

}  // namespace dexgrasp
