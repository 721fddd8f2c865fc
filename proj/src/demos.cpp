#include "dexgrasp/demos.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <set>
#include <unordered_set>

#include "dexgrasp/errors.hpp"
#include "dexgrasp/features.hpp"

namespace dexgrasp {

namespace {

using Shape = AnalyticObject::Shape;

const std::set<Shape>& applicable_shapes(DemoType type) {
    static const std::set<Shape> solid = {Shape::Sphere, Shape::Box, Shape::Cylinder};
    static const std::set<Shape> tube = {Shape::Cylinder, Shape::Cup, Shape::Mug};
    static const std::set<Shape> vessel = {Shape::Cup, Shape::Mug};
    static const std::set<Shape> mug = {Shape::Mug};
    static const std::set<Shape> box = {Shape::Box};
    switch (type) {
        case DemoType::PinchTopX:
        case DemoType::PinchTopY:
        case DemoType::TripodTop:
        case DemoType::PowerTop:
            return solid;
        case DemoType::PowerSide:
        case DemoType::PowerSideLow:
            return tube;
        case DemoType::RimGrasp:
        case DemoType::RimGraspY:
            return vessel;
        case DemoType::HandleGrasp:
            return mug;
        case DemoType::EdgePinch:
            return box;
    }
    return solid;
}

Quat top_grip(double roll) {
    return Quat(Eigen::AngleAxisd(M_PI, Vec3::UnitX())) *
           Quat(Eigen::AngleAxisd(roll, Vec3::UnitZ()));
}

// Side approach along `-approach` with finger 0 offset along `finger0`.
Quat side_grip(const Vec3& approach, const Vec3& finger0) {
    Mat3 rot;
    rot.col(0) = finger0.normalized();
    rot.col(2) = approach.normalized();
    rot.col(1) = rot.col(2).cross(rot.col(0));
    return Quat(rot);
}

struct ClosurePlan {
    Pose wrist;
    std::function<VecX(double)> joints;
    std::vector<int> required_links;  // all must be in contact
    int min_contacts = 0;             // and at least this many links overall
    bool deepest = false;             // pick the valid closure with most contacts
    Pose camera;
};

VecX pinch_pattern(const KinematicHand& hand, const std::vector<int>& active, double c,
                   double splay = -0.25) {
    const int J = hand.joints_per_finger();
    VecX q = VecX::Constant(hand.dof(), -0.3);
    for (int f : active) {
        q[f * J] = splay;
        for (int j = 1; j < J; ++j) q[f * J + j] = c;
    }
    return q;
}

VecX wrap_pattern(const KinematicHand& hand, double c) {
    return VecX::Constant(hand.dof(), c);
}

// Side wrap: fingers 0/1 reach past the body (proximal joint held) and curl
// their outer links around it; finger 2 curls onto the near side.
VecX side_wrap_pattern(const KinematicHand& hand, double c) {
    const int J = hand.joints_per_finger();
    VecX q = VecX::Constant(hand.dof(), c);
    q[0 * J] = 0.2;
    q[1 * J] = 0.2;
    return q;
}

double link_gap(const AnalyticObject& object, const KinematicHand& hand, int link,
                const Pose& link_pose) {
    Vec3 a, b;
    hand.link_segment(link, link_pose, a, b);
    const double radius = hand.link_geometry(link).radius;
    double best = std::numeric_limits<double>::infinity();
    for (int s = 0; s < 9; ++s) {
        const Vec3 p = a + (b - a) * (s / 8.0);
        best = std::min(best, object.sdf(p) - radius);
    }
    return best;
}

ClosurePlan make_plan(const AnalyticObject& o, DemoType type, const KinematicHand& hand) {
    const Vec3 c = o.pose.p;
    const double top = c.z() + o.top_height();
    const double body_r = o.params[0];
    const std::vector<int> tips01 = {hand.fingertip_link(0), hand.fingertip_link(1)};
    const std::vector<int> tips012 = {hand.fingertip_link(0), hand.fingertip_link(1),
                                      hand.fingertip_link(2)};

    ClosurePlan plan;
    const double cam_dist = 0.45;
    switch (type) {
        case DemoType::PinchTopX:
            plan.wrist = Pose(Vec3(c.x(), c.y(), top + 0.06), top_grip(0));
            plan.joints = [&hand](double v) { return pinch_pattern(hand, {0, 1}, v); };
            plan.required_links = tips01;
            plan.camera = camera_pose_at(c, cam_dist, 55 * M_PI / 180, 0.8);
            break;
        case DemoType::PinchTopY:
            plan.wrist = Pose(Vec3(c.x(), c.y(), top + 0.06), top_grip(M_PI / 2));
            plan.joints = [&hand](double v) { return pinch_pattern(hand, {0, 1}, v); };
            plan.required_links = tips01;
            plan.camera = camera_pose_at(c, cam_dist, 55 * M_PI / 180, 0.8 + M_PI / 2);
            break;
        case DemoType::TripodTop:
            plan.wrist = Pose(Vec3(c.x(), c.y(), top + 0.06), top_grip(0));
            plan.joints = [&hand](double v) { return pinch_pattern(hand, {0, 1, 2}, v); };
            plan.required_links = tips012;
            plan.camera = camera_pose_at(c, cam_dist, 55 * M_PI / 180, 0.8);
            break;
        case DemoType::PowerSide:
            plan.wrist = Pose(Vec3(c.x() + body_r + 0.04, c.y(), c.z()),
                              side_grip(-Vec3::UnitX(), -Vec3::UnitY()));
            plan.joints = [&hand](double v) { return side_wrap_pattern(hand, v); };
            plan.min_contacts = 4;
            plan.deepest = true;
            plan.camera = camera_pose_at(c, cam_dist, 35 * M_PI / 180, 0.0);
            break;
        case DemoType::PowerTop:
            plan.wrist = Pose(Vec3(c.x(), c.y(), top + 0.05), top_grip(0));
            plan.joints = [&hand](double v) { return wrap_pattern(hand, v); };
            plan.min_contacts = 3;
            plan.camera = camera_pose_at(c, cam_dist, 55 * M_PI / 180, 0.8);
            break;
        case DemoType::RimGrasp: {
            const double wall = o.params[2];
            plan.wrist = Pose(Vec3(c.x() + body_r - wall / 2, c.y(), top + 0.095), top_grip(0));
            plan.joints = [&hand](double v) { return pinch_pattern(hand, {0, 1}, v, 0.0); };
            plan.required_links = tips01;
            plan.camera = camera_pose_at(c, cam_dist, 55 * M_PI / 180, 0.3);
            break;
        }
        case DemoType::HandleGrasp: {
            const double ring = 0.6 * o.params[1];
            plan.wrist = Pose(Vec3(c.x() + body_r + ring + 0.075, c.y(), c.z()),
                              side_grip(-Vec3::UnitX(), Vec3::UnitY()));
            plan.joints = [&hand](double v) { return pinch_pattern(hand, {0, 1}, v); };
            plan.required_links = tips01;
            plan.camera = camera_pose_at(c, cam_dist, 35 * M_PI / 180, 0.2);
            break;
        }
        case DemoType::EdgePinch: {
            const double hx = o.params[0];
            const Vec3 edge(c.x() + hx, c.y(), top);
            const Vec3 approach = Vec3(1, 0, -1).normalized();
            plan.wrist = Pose(edge - 0.10 * approach,
                              Quat(Eigen::AngleAxisd(3 * M_PI / 4, Vec3::UnitY())));
            plan.joints = [&hand](double v) { return pinch_pattern(hand, {0, 1}, v, 0.0); };
            plan.required_links = tips01;
            plan.camera = camera_pose_at(c, cam_dist, 45 * M_PI / 180, 0.2);
            break;
        }
        case DemoType::PowerSideLow:
            plan.wrist = Pose(Vec3(c.x() - body_r - 0.05, c.y(), c.z()),
                              side_grip(Vec3::UnitX(), Vec3::UnitY()));
            plan.joints = [&hand](double v) { return side_wrap_pattern(hand, v); };
            plan.min_contacts = 4;
            plan.deepest = true;
            plan.camera = camera_pose_at(c, cam_dist, 35 * M_PI / 180, M_PI);
            break;
        case DemoType::RimGraspY: {
            const double wall = o.params[2];
            plan.wrist =
                Pose(Vec3(c.x(), c.y() + body_r - wall / 2, top + 0.095), top_grip(M_PI / 2));
            plan.joints = [&hand](double v) { return pinch_pattern(hand, {0, 1}, v, 0.0); };
            plan.required_links = tips01;
            plan.camera = camera_pose_at(c, cam_dist, 55 * M_PI / 180, M_PI / 2 + 0.3);
            break;
        }
    }
    return plan;
}

}  // namespace

bool demo_applicable(DemoType type, Shape shape) {
    return applicable_shapes(type).count(shape) > 0;
}

AnalyticObject demo_object(DemoType type) {
    switch (type) {
        case DemoType::PinchTopX:
        case DemoType::EdgePinch:
            return make_box(Vec3(0.03, 0.03, 0.03));
        case DemoType::PinchTopY:
        case DemoType::PowerSide:
            return make_cylinder(0.02, 0.06);
        case DemoType::TripodTop:
        case DemoType::PowerTop:
            return make_sphere(0.035);
        case DemoType::RimGrasp:
        case DemoType::PowerSideLow:
            return make_cup(0.035, 0.045, 0.004);
        case DemoType::HandleGrasp:
        case DemoType::RimGraspY:
            return make_mug(0.035, 0.045, 0.004);
    }
    return make_sphere(0.035);
}

std::vector<Vec3> voxel_downsample(const std::vector<Vec3>& cloud, double cell) {
    std::unordered_set<int64_t> seen;
    std::vector<Vec3> out;
    for (const Vec3& p : cloud) {
        const int64_t kx = static_cast<int64_t>(std::floor(p.x() / cell));
        const int64_t ky = static_cast<int64_t>(std::floor(p.y() / cell));
        const int64_t kz = static_cast<int64_t>(std::floor(p.z() / cell));
        const int64_t key = (kx * 73856093) ^ (ky * 19349663) ^ (kz * 83492791);
        if (seen.insert(key).second) out.push_back(p);
    }
    return out;
}

ScriptedDemo scripted_demo(const AnalyticObject& object, DemoType type,
                           const KinematicHand& hand) {
    if (!demo_applicable(type, object.shape))
        throw Inapplicable("scripted_demo: grasp type does not suit the shape");

    const ClosurePlan plan = make_plan(object, type, hand);

    // Scan the closure parameter until the required links reach contact
    // without deep penetration anywhere.
    const double contact_on = 0.004, max_pen = -0.003;
    double chosen = -1;
    std::vector<int> contact_links;
    for (int step = 0; step <= 800; ++step) {
        const double c = 2.0 * step / 800.0;
        const VecX q = hand.clamp_config(plan.joints(c));
        const std::vector<Pose> links = hand.forward_kinematics(plan.wrist, q);
        double worst = std::numeric_limits<double>::infinity();
        std::vector<int> touching;
        for (int link = 0; link < hand.num_links(); ++link) {
            const double gap = link_gap(object, hand, link, links[link]);
            worst = std::min(worst, gap);
            if (gap < contact_on) touching.push_back(link);
        }
        if (worst < max_pen) continue;
        bool ok = static_cast<int>(touching.size()) >= plan.min_contacts;
        for (int req : plan.required_links)
            ok = ok && std::find(touching.begin(), touching.end(), req) != touching.end();
        if (!ok || touching.empty()) continue;
        if (plan.deepest) {
            if (touching.size() > contact_links.size()) {
                chosen = c;
                contact_links = touching;
            }
        } else {
            chosen = c;
            contact_links = touching;
            break;
        }
    }
    if (chosen < 0) throw std::runtime_error("scripted_demo: closure scan found no contact");

    ScriptedDemo out;
    out.camera = plan.camera;
    out.contact_links = contact_links;

    Rng render_rng(0);
    const RenderResult render =
        render_depth(object, plan.camera, CameraIntrinsics{}, 0.0, render_rng);
    out.cloud = voxel_downsample(render.cloud, 0.004);
    out.demo.features = extract_features(out.cloud, 0.008, plan.camera.p);

    out.demo.final_wrist = plan.wrist;
    out.demo.final_config = hand.clamp_config(plan.joints(chosen));
    for (int i = 0; i < 5; ++i)
        out.demo.joint_trajectory.push_back(hand.clamp_config(plan.joints(chosen * i / 4.0)));
    out.demo.grasp_type = static_cast<int>(type);
    return out;
}

}  // namespace dexgrasp
