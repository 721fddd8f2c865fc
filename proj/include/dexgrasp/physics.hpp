#pragma once

#include <string>
#include <utility>

#include "dexgrasp/pose.hpp"

namespace dexgrasp {

/// Per-scene domain randomization draw.
struct PhysicsDraw {
    double mass_grams = 0;
    double friction = 0.75;        // [0.5, 1.0]
    double scale = 1.0;            // [0.9, 1.1]
    double depth_noise_sigma = 0.004;  // meters
};

/// Mass range in grams for an object class. Throws UnknownClass.
std::pair<double, double> mass_range(const std::string& class_label);

/// Uniform draws within the class mass range and the shared friction/scale
/// ranges. Throws UnknownClass.
PhysicsDraw draw_physics(const std::string& class_label, Rng& rng);

}  // namespace dexgrasp
