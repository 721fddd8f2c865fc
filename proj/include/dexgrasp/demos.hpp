#pragma once

#include "dexgrasp/grasp_model.hpp"
#include "dexgrasp/objects.hpp"
#include "dexgrasp/render.hpp"

namespace dexgrasp {

/// The ten scripted demonstration grasp types.
enum class DemoType {
    PinchTopX = 1,   // two-finger pinch from above, across x
    PinchTopY = 2,   // two-finger pinch from above, across y
    TripodTop = 3,   // three fingertips from above
    PowerSide = 4,   // side approach, full wrap at mid height
    PowerTop = 5,    // top approach, strong curl around the body
    RimGrasp = 6,    // pinch the vessel wall from above (+x side)
    HandleGrasp = 7, // pinch the mug handle ring
    EdgePinch = 8,   // diagonal pinch over a box top edge
    PowerSideLow = 9,// side approach wrap, lower on the body
    RimGraspY = 10,  // rim pinch on the +y side
};

bool demo_applicable(DemoType type, AnalyticObject::Shape shape);

/// Canonical object for each demo type (from standard_objects()).
AnalyticObject demo_object(DemoType type);

struct ScriptedDemo {
    DemoGrasp demo;                 // features, trajectory, final pose
    std::vector<Vec3> cloud;        // sensed cloud the features came from
    Pose camera;                    // the sensing viewpoint
    std::vector<int> contact_links; // links within contact distance at the end
};

/// Deterministic parametric grasp on the object. Throws Inapplicable when the
/// type does not suit the shape, std::runtime_error when the closure scan
/// cannot reach contact.
ScriptedDemo scripted_demo(const AnalyticObject& object, DemoType type,
                           const KinematicHand& hand);

/// Grid downsample keeping one point per cell (the first encountered).
std::vector<Vec3> voxel_downsample(const std::vector<Vec3>& cloud, double cell);

}  // namespace dexgrasp
