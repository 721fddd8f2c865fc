#pragma once

#include <vector>

#include "dexgrasp/pose.hpp"

namespace dexgrasp {

/// KDE over hand joint configurations along the demonstrated closing
/// trajectory, with extrapolation parameter beta. gamma = 0 is the final
/// (grip) configuration, gamma = 1 the initial one.
class HandConfigModel {
public:
    HandConfigModel() = default;
    HandConfigModel(const VecX& start, const VecX& grip, double alpha, double beta, double sigma,
                    int gamma_grid);

    const VecX& start_config() const { return start_; }   // h_c^t
    const VecX& grip_config() const { return grip_; }     // h_c^g
    double alpha() const { return alpha_; }
    double beta() const { return beta_; }
    double sigma() const { return sigma_; }
    const std::vector<double>& gammas() const { return gammas_; }
    const std::vector<double>& raw_weights() const { return raw_weights_; }
    const std::vector<double>& weights() const { return weights_; }

    VecX interpolate(double gamma) const { return (1.0 - gamma) * grip_ + gamma * start_; }

    double log_eval(const VecX& h_c) const;
    double eval(const VecX& h_c) const { return std::exp(log_eval(h_c)); }
    VecX sample(Rng& rng) const;

private:
    VecX start_, grip_;
    double alpha_ = 10.0, beta_ = 1.2, sigma_ = 0.05;
    std::vector<double> gammas_;
    std::vector<double> raw_weights_;
    std::vector<double> weights_;  // normalized
    std::vector<double> cumulative_;
};

/// Builds the model from a demonstrated joint trajectory (first point maps to
/// h_c^t, last to h_c^g). Throws TooShort for fewer than two points.
HandConfigModel learn_hand_config_model(const std::vector<VecX>& trajectory, double alpha,
                                        double beta, double sigma, int gamma_grid);

}  // namespace dexgrasp
