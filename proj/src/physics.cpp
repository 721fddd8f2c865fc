#include "dexgrasp/physics.hpp"

#include <map>

#include "dexgrasp/errors.hpp"

namespace dexgrasp {

std::pair<double, double> mass_range(const std::string& class_label) {
    static const std::map<std::string, std::pair<double, double>> ranges = {
        {"Bottle", {30, 70}},    {"Bowl", {50, 400}},    {"Box", {50, 500}},
        {"Can", {200, 400}},     {"Cup", {30, 330}},     {"Fork", {40, 80}},
        {"Pan", {150, 450}},     {"Plate", {40, 80}},    {"Scissors", {50, 150}},
        {"Shaker", {100, 160}},  {"Spatula", {40, 80}},  {"Spoon", {40, 80}},
        {"Teacup", {150, 250}},  {"Teapot", {500, 800}}, {"Jug", {80, 200}},
        {"Knife", {50, 150}},    {"Mug", {250, 350}},    {"Funnel", {40, 80}},
        {"Ball", {50, 70}},      {"Dustpan", {100, 150}},
    };
    const auto it = ranges.find(class_label);
    if (it == ranges.end()) throw UnknownClass("mass_range: unknown class " + class_label);
    return it->second;
}

PhysicsDraw draw_physics(const std::string& class_label, Rng& rng) {
    const auto [lo, hi] = mass_range(class_label);
    PhysicsDraw d;
    d.mass_grams = std::uniform_real_distribution<double>(lo, hi)(rng);
    d.friction = std::uniform_real_distribution<double>(0.5, 1.0)(rng);
    d.scale = std::uniform_real_distribution<double>(0.9, 1.1)(rng);
    return d;
}

}  // namespace dexgrasp
