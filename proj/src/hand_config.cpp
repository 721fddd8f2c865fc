#include "dexgrasp/hand_config.hpp"

#include <algorithm>
#include <cmath>

#include "dexgrasp/errors.hpp"
#include "dexgrasp/kernels.hpp"

namespace dexgrasp {

HandConfigModel::HandConfigModel(const VecX& start, const VecX& grip, double alpha, double beta,
                                 double sigma, int gamma_grid)
    : start_(start), grip_(grip), alpha_(alpha), beta_(beta), sigma_(sigma) {
    if (start_.size() != grip_.size())
        throw DimensionMismatch("HandConfigModel: endpoint dimensions differ");
    if (gamma_grid < 1) throw std::invalid_argument("HandConfigModel: gamma grid must be >= 1");

    gammas_.resize(gamma_grid);
    raw_weights_.resize(gamma_grid);
    weights_.resize(gamma_grid);
    cumulative_.resize(gamma_grid);
    double total = 0;
    for (int k = 0; k < gamma_grid; ++k) {
        const double g = gamma_grid == 1
                             ? 0.0
                             : -beta_ + 2.0 * beta_ * static_cast<double>(k) / (gamma_grid - 1);
        gammas_[k] = g;
        const double w = std::exp(-alpha_ * (interpolate(g) - grip_).squaredNorm());
        raw_weights_[k] = w;
        total += w;
    }
    double acc = 0;
    for (int k = 0; k < gamma_grid; ++k) {
        weights_[k] = raw_weights_[k] / total;
        acc += weights_[k];
        cumulative_[k] = acc;
    }
    cumulative_.back() = 1.0;
}

double HandConfigModel::log_eval(const VecX& h_c) const {
    double best = -std::numeric_limits<double>::infinity();
    std::vector<double> terms(gammas_.size());
    for (size_t k = 0; k < gammas_.size(); ++k) {
        terms[k] = std::log(weights_[k]) + log_gaussian(h_c, interpolate(gammas_[k]), sigma_);
        best = std::max(best, terms[k]);
    }
    if (!std::isfinite(best)) return best;
    double sum = 0;
    for (double t : terms) sum += std::exp(t - best);
    return best + std::log(sum);
}

VecX HandConfigModel::sample(Rng& rng) const {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const auto it = std::lower_bound(cumulative_.begin(), cumulative_.end(), u(rng));
    const size_t k = std::min<size_t>(it - cumulative_.begin(), gammas_.size() - 1);
    std::normal_distribution<double> n(0.0, sigma_);
    VecX out = interpolate(gammas_[k]);
    for (int i = 0; i < out.size(); ++i) out[i] += n(rng);
    return out;
}

HandConfigModel learn_hand_config_model(const std::vector<VecX>& trajectory, double alpha,
                                        double beta, double sigma, int gamma_grid) {
    if (trajectory.size() < 2) throw TooShort("learn_hand_config_model: trajectory length < 2");
    return HandConfigModel(trajectory.front(), trajectory.back(), alpha, beta, sigma, gamma_grid);
}

}  // namespace dexgrasp
