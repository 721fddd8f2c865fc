#pragma once

#include <string>
#include <vector>

#include "dexgrasp/pose.hpp"

namespace dexgrasp {

/// Parametric desk-scale object with an analytic signed distance function.
///
/// Shape parameters (meters, in the object frame, origin at the geometric
/// center):
///   Sphere:   params[0] = radius
///   Box:      params[0..2] = half extents
///   Cylinder: params[0] = radius, params[1] = half height
///   Cup:      params[0] = outer radius, params[1] = half height,
///             params[2] = wall thickness (open-topped vessel)
///   Mug:      cup params plus a side handle (torus)
struct AnalyticObject {
    enum class Shape { Sphere, Box, Cylinder, Cup, Mug };

    Shape shape = Shape::Sphere;
    std::string class_label = "Ball";
    Pose pose;  // object frame -> world
    std::vector<double> params = {0.03};

    /// Signed distance to the surface at a world point (negative inside).
    double sdf(const Vec3& p_world) const;

    /// Outward unit normal (normalized SDF gradient) at a world point.
    Vec3 normal(const Vec3& p_world) const;

    /// Center of mass (uniform density approximation: the frame origin).
    Vec3 com() const { return pose.p; }

    /// Radius of a bounding sphere around the frame origin.
    double bounding_radius() const;

    /// Height of the highest surface point above the frame origin.
    double top_height() const;

    /// Deterministic quasi-uniform surface samples (world frame).
    std::vector<Vec3> sample_surface(int count, Rng& rng) const;
};

/// Factory helpers; each object rests on the z=0 table plane.
AnalyticObject make_sphere(double radius, const Vec3& center_xy = Vec3::Zero());
AnalyticObject make_box(const Vec3& half_extents, const Vec3& center_xy = Vec3::Zero());
AnalyticObject make_cylinder(double radius, double half_height,
                             const Vec3& center_xy = Vec3::Zero());
AnalyticObject make_cup(double radius, double half_height, double wall,
                        const Vec3& center_xy = Vec3::Zero());
AnalyticObject make_mug(double radius, double half_height, double wall,
                        const Vec3& center_xy = Vec3::Zero());

/// The five parametric families standing in for the paper's 20 classes.
std::vector<AnalyticObject> standard_objects();

}  // namespace dexgrasp
