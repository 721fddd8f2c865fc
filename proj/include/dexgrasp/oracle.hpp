#pragma once

#include <vector>

#include "dexgrasp/hand.hpp"
#include "dexgrasp/objects.hpp"
#include "dexgrasp/physics.hpp"

namespace dexgrasp {

struct Contact {
    Vec3 point;   // on the object surface, world frame
    Vec3 normal;  // outward object normal at the contact
    int link = -1;
};

struct OracleConfig {
    double contact_tol = 0.005;       // link surface within this of the object
    double penetration_limit = 0.005;  // deeper than this -> crush/collision failure
    int cone_edges = 8;
    double torsion = 0.005;           // soft-finger torsional arm, meters
    double safety_factor = 1.5;
    double gravity = 9.81;            // m/s^2
    double max_contact_force = 20.0;  // Newtons per contact
};

struct OracleReport {
    bool success = false;
    bool force_closure = false;
    bool gravity_ok = false;
    bool penetrated = false;
    double max_penetration = 0;
    std::vector<Contact> contacts;
};

/// Contacts between the hand capsules and the object surface; at most one per
/// link (the closest approach). `max_penetration` reports the deepest capsule
/// intrusion in meters.
std::vector<Contact> extract_contacts(const AnalyticObject& object, const KinematicHand& hand,
                                      const Pose& h_w, const VecX& h_c, double tol,
                                      double* max_penetration = nullptr);

/// Discretized friction cone edges (unit force directions pressing into the
/// object) for a contact with outward normal n.
std::vector<Vec3> friction_cone_edges(const Vec3& normal, double mu, int edges);

/// Strict force closure: the origin of 6D wrench space lies in the interior
/// of the convex hull of the primitive contact wrenches (torques about com).
/// Contacts are soft-finger: besides the cone edges, each contributes a
/// torsional moment up to `torsion` times the normal force.
bool force_closure(const std::vector<Contact>& contacts, const Vec3& com, double mu, int edges,
                   double torsion);

/// Can bounded contact forces balance the (safety-scaled) gravity wrench?
bool supports_gravity(const std::vector<Contact>& contacts, const Vec3& com, double mu,
                      int edges, double mass_kg, const OracleConfig& config);

OracleReport grasp_outcome_oracle(const AnalyticObject& object, const PhysicsDraw& physics,
                                  const Pose& h_w, const VecX& h_c, const KinematicHand& hand,
                                  const OracleConfig& config = {});

struct ExecutionConfig {
    double advance_step = 0.002;  // wrist advance per step along the approach axis
    double advance_max = 0.06;
    double retreat_max = 0.1;     // back-off allowance when the commanded pose is blocked
    double close_step = 0.02;     // per-joint closing increment, radians
    double table_z = 0.0;
};

struct ExecutedGrasp {
    Pose h_w;
    VecX h_c;
};

/// Deterministic compliant execution of a commanded grasp. With the fingers in
/// the approach (open) configuration, slide the wrist along the approach axis
/// as deep as the object and table allow, then close each finger until its tip
/// touches the object, wrapping past links that make contact first (breakaway).
/// The result is what the outcome oracle should judge.
ExecutedGrasp execute_grasp(const AnalyticObject& object, const KinematicHand& hand,
                            const Pose& h_w, const VecX& open_config,
                            const OracleConfig& oracle = {}, const ExecutionConfig& exec = {});

}  // namespace dexgrasp
