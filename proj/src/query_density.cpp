#include "dexgrasp/query_density.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "dexgrasp/errors.hpp"

namespace dexgrasp {

QueryDensity::QueryDensity(std::vector<Kernel> kernels, double sigma_p, double sigma_q,
                           int link_id, int grasp_type)
    : kernels_(std::move(kernels)),
      sigma_p_(sigma_p),
      sigma_q_(sigma_q),
      link_id_(link_id),
      grasp_type_(grasp_type) {
    if (kernels_.empty()) throw EmptyInput("QueryDensity: no kernels");
    double total = 0;
    for (const Kernel& k : kernels_) total += k.weight;
    if (total <= 0) throw std::invalid_argument("QueryDensity: zero total weight");
    cumulative_.resize(kernels_.size());
    double acc = 0;
    for (size_t i = 0; i < kernels_.size(); ++i) {
        kernels_[i].weight /= total;
        acc += kernels_[i].weight;
        cumulative_[i] = acc;
    }
    cumulative_.back() = 1.0;
}

double QueryDensity::log_eval(const Pose& s) const {
    double best = -std::numeric_limits<double>::infinity();
    const double inv2sp2 = 1.0 / (2.0 * sigma_p_ * sigma_p_);
    std::vector<double> terms;
    terms.reserve(kernels_.size());
    for (const Kernel& k : kernels_) {
        const double lp = -(s.p - k.mean.p).squaredNorm() * inv2sp2;
        const double t = std::abs(s.q.dot(k.mean.q)) * sigma_q_;
        const double term = std::log(k.weight) + lp + t + std::log1p(std::exp(-2.0 * t));
        terms.push_back(term);
        best = std::max(best, term);
    }
    if (!std::isfinite(best)) return best;
    double sum = 0;
    for (double t : terms) sum += std::exp(t - best);
    // Constant normalizers shared by every kernel.
    const double log_norm = -1.5 * std::log(2.0 * M_PI * sigma_p_ * sigma_p_) +
                            log_vmf_normalizer_s3(sigma_q_) - std::log(2.0);
    return best + std::log(sum) + log_norm;
}

Pose QueryDensity::sample(Rng& rng) const {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const auto it = std::lower_bound(cumulative_.begin(), cumulative_.end(), u(rng));
    const size_t i = std::min<size_t>(it - cumulative_.begin(), kernels_.size() - 1);
    Pose out;
    // Kernel-frame delta: isotropic, and keeps sampling rigidly equivariant.
    out.p = kernels_[i].mean.p + kernels_[i].mean.q * random_gaussian3(sigma_p_, rng);
    out.q = sample_vmf_pair(kernels_[i].mean.q, sigma_q_, rng);
    return out;
}

Pose QueryDensity::mode() const {
    size_t best = 0;
    for (size_t i = 1; i < kernels_.size(); ++i)
        if (kernels_[i].weight > kernels_[best].weight) best = i;
    return kernels_[best].mean;
}

QueryDensity compute_query_density(const ContactModel& contact, const ObjectModel& novel,
                                   const TransferOptions& options, Rng& rng) {
    if (options.kq < 1) throw std::invalid_argument("compute_query_density: K_Q must be >= 1");
    if (novel.kde.size() == 0) throw DegenerateObject("compute_query_density: empty object model");

    std::vector<QueryDensity::Kernel> kernels;
    kernels.reserve(options.kq);
    for (int j = 0; j < options.kq; ++j) {
        const SurfaceFeature x = novel.kde.sample(rng);
        const SurfaceFeature rel = contact.kde.sample(rng);  // (u, r_m)
        QueryDensity::Kernel k;
        k.mean = x.pose.compose(rel.pose);
        k.weight = contact.curvature_likelihood(x.r);
        if (options.prototype) k.weight *= options.prototype->curvature_likelihood(x.r);
        kernels.push_back(k);
    }
    double total = 0;
    for (const auto& k : kernels) total += k.weight;
    if (total <= 0) {
        // All samples fell outside the curvature support; keep a uniform fallback.
        for (auto& k : kernels) k.weight = 1.0;
    }
    return QueryDensity(std::move(kernels), contact.kde.bandwidth().sigma_p,
                        contact.kde.bandwidth().sigma_q, contact.link_id, -1);
}

QueryDensityBatch query_density_batch(const GraspModel& model, const ObjectModel& novel,
                                      const TransferOptions& options, Rng& rng) {
    const auto start = std::chrono::steady_clock::now();
    QueryDensityBatch batch;
    for (const ContactModel& c : model.contacts) {
        QueryDensity qd = compute_query_density(c, novel, options, rng);
        batch.densities.emplace_back(qd.kernels(), qd.sigma_p(), qd.sigma_q(), qd.link_id(),
                                     model.grasp_type);
        }
    batch.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return batch;
}

}  // namespace dexgrasp
