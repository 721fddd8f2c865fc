#include "dexgrasp/objects.hpp"

#include <algorithm>
#include <cmath>

namespace dexgrasp {

namespace {

double sd_sphere(const Vec3& p, double r) { return p.norm() - r; }

double sd_box(const Vec3& p, const Vec3& h) {
    const Vec3 q = p.cwiseAbs() - h;
    return q.cwiseMax(0.0).norm() + std::min(q.maxCoeff(), 0.0);
}

double sd_cylinder(const Vec3& p, double r, double hh) {
    const Vec2 d(std::hypot(p.x(), p.y()) - r, std::abs(p.z()) - hh);
    return std::min(std::max(d.x(), d.y()), 0.0) + d.cwiseMax(0.0).norm();
}

// Open vessel: outer cylinder minus an inner cavity that extends past the rim.
double sd_cup(const Vec3& p, double r, double hh, double wall) {
    const double outer = sd_cylinder(p, r, hh);
    const Vec3 cavity_p = p - Vec3(0, 0, wall);
    const double cavity = sd_cylinder(cavity_p, r - wall, hh);
    return std::max(outer, -cavity);
}

// Torus in the xz-plane of its own frame: ring radius R, tube radius t.
double sd_torus_xz(const Vec3& p, double R, double t) {
    const Vec2 q(std::hypot(p.x(), p.z()) - R, p.y());
    return q.norm() - t;
}

double sd_mug(const Vec3& p, double r, double hh, double wall) {
    const double body = sd_cup(p, r, hh, wall);
    // Handle: a torus on the +x side, ring in the xz-plane.
    const double ring = 0.6 * hh;
    const Vec3 hp = p - Vec3(r, 0, 0);
    const double handle = sd_torus_xz(hp, ring, wall);
    return std::min(body, handle);
}

double object_sdf_local(const AnalyticObject& o, const Vec3& p) {
    using Shape = AnalyticObject::Shape;
    switch (o.shape) {
        case Shape::Sphere:
            return sd_sphere(p, o.params[0]);
        case Shape::Box:
            return sd_box(p, Vec3(o.params[0], o.params[1], o.params[2]));
        case Shape::Cylinder:
            return sd_cylinder(p, o.params[0], o.params[1]);
        case Shape::Cup:
            return sd_cup(p, o.params[0], o.params[1], o.params[2]);
        case Shape::Mug:
            return sd_mug(p, o.params[0], o.params[1], o.params[2]);
    }
    return 0;
}

}  // namespace

double AnalyticObject::sdf(const Vec3& p_world) const {
    return object_sdf_local(*this, pose.inverse().apply(p_world));
}

Vec3 AnalyticObject::normal(const Vec3& p_world) const {
    const Pose inv = pose.inverse();
    const Vec3 p = inv.apply(p_world);
    const double h = 1e-6;
    Vec3 g;
    for (int a = 0; a < 3; ++a) {
        Vec3 lo = p, hi = p;
        lo[a] -= h;
        hi[a] += h;
        g[a] = object_sdf_local(*this, hi) - object_sdf_local(*this, lo);
    }
    if (g.norm() < 1e-15) return Vec3::UnitZ();
    return pose.q * g.normalized();
}

double AnalyticObject::bounding_radius() const {
    using Shape = AnalyticObject::Shape;
    switch (shape) {
        case Shape::Sphere:
            return params[0];
        case Shape::Box:
            return Vec3(params[0], params[1], params[2]).norm();
        case Shape::Cylinder:
        case Shape::Cup:
            return std::hypot(params[0], params[1]);
        case Shape::Mug:
            // Body plus the handle extent on the +x side.
            return std::hypot(params[0] + 0.6 * params[1] + params[2], params[1]);
    }
    return 0;
}

double AnalyticObject::top_height() const {
    switch (shape) {
        case Shape::Sphere:
            return params[0];
        case Shape::Box:
            return params[2];
        default:
            return params[1];
    }
}

std::vector<Vec3> AnalyticObject::sample_surface(int count, Rng& rng) const {
    std::normal_distribution<double> g(0.0, 1.0);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const double r = bounding_radius();
    std::vector<Vec3> out;
    out.reserve(count);
    int guard = 0;
    while (static_cast<int>(out.size()) < count && guard++ < 50 * count) {
        // Project a random nearby point onto the surface by gradient descent
        // on |sdf|.
        Vec3 p = pose.p + r * Vec3(u(rng), u(rng), u(rng));
        bool ok = false;
        for (int it = 0; it < 30; ++it) {
            const double d = sdf(p);
            if (std::abs(d) < 1e-9) {
                ok = true;
                break;
            }
            p -= d * normal(p);
        }
        if (ok) out.push_back(p);
    }
    return out;
}

namespace {

AnalyticObject resting(AnalyticObject o, double half_height, const Vec3& center_xy) {
    o.pose = Pose(Vec3(center_xy.x(), center_xy.y(), half_height), Quat::Identity());
    return o;
}

}  // namespace

AnalyticObject make_sphere(double radius, const Vec3& center_xy) {
    AnalyticObject o;
    o.shape = AnalyticObject::Shape::Sphere;
    o.class_label = "Ball";
    o.params = {radius};
    return resting(o, radius, center_xy);
}

AnalyticObject make_box(const Vec3& h, const Vec3& center_xy) {
    AnalyticObject o;
    o.shape = AnalyticObject::Shape::Box;
    o.class_label = "Box";
    o.params = {h.x(), h.y(), h.z()};
    return resting(o, h.z(), center_xy);
}

AnalyticObject make_cylinder(double radius, double half_height, const Vec3& center_xy) {
    AnalyticObject o;
    o.shape = AnalyticObject::Shape::Cylinder;
    o.class_label = "Can";
    o.params = {radius, half_height};
    return resting(o, half_height, center_xy);
}

AnalyticObject make_cup(double radius, double half_height, double wall, const Vec3& center_xy) {
    AnalyticObject o;
    o.shape = AnalyticObject::Shape::Cup;
    o.class_label = "Cup";
    o.params = {radius, half_height, wall};
    return resting(o, half_height, center_xy);
}

AnalyticObject make_mug(double radius, double half_height, double wall, const Vec3& center_xy) {
    AnalyticObject o;
    o.shape = AnalyticObject::Shape::Mug;
    o.class_label = "Mug";
    o.params = {radius, half_height, wall};
    return resting(o, half_height, center_xy);
}

std::vector<AnalyticObject> standard_objects() {
    return {make_sphere(0.035), make_box(Vec3(0.03, 0.03, 0.03)), make_cylinder(0.02, 0.06),
            make_cup(0.035, 0.045, 0.004), make_mug(0.035, 0.045, 0.004)};
}

}  // namespace dexgrasp
