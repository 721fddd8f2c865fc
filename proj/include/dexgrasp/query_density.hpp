#pragma once

#include <vector>

#include "dexgrasp/grasp_model.hpp"
#include "dexgrasp/kde.hpp"

namespace dexgrasp {

/// KDE over absolute workspace poses of one hand link on a novel object,
/// built by Monte-Carlo convolution of a contact model with the object model.
class QueryDensity {
public:
    struct Kernel {
        Pose mean;
        double weight = 0.0;
    };

    QueryDensity() = default;
    QueryDensity(std::vector<Kernel> kernels, double sigma_p, double sigma_q, int link_id,
                 int grasp_type);

    const std::vector<Kernel>& kernels() const { return kernels_; }
    int link_id() const { return link_id_; }
    int grasp_type() const { return grasp_type_; }
    double sigma_p() const { return sigma_p_; }
    double sigma_q() const { return sigma_q_; }

    double log_eval(const Pose& s) const;
    double eval(const Pose& s) const { return std::exp(log_eval(s)); }
    Pose sample(Rng& rng) const;

    /// Highest-weight kernel mean (mode proxy).
    Pose mode() const;

private:
    std::vector<Kernel> kernels_;
    double sigma_p_ = 0.005, sigma_q_ = 100.0;
    int link_id_ = -1, grasp_type_ = 1;
    std::vector<double> cumulative_;
};

struct TransferOptions {
    int kq = 500;  // kernels per query density
    /// Conservative (per-view, clustered) mode: weights additionally gated by
    /// the cluster prototype's curvature likelihood.
    const ContactModel* prototype = nullptr;
};

QueryDensity compute_query_density(const ContactModel& contact, const ObjectModel& novel,
                                   const TransferOptions& options, Rng& rng);

struct QueryDensityBatch {
    std::vector<QueryDensity> densities;
    double wall_seconds = 0;  // recorded, not asserted
};

QueryDensityBatch query_density_batch(const GraspModel& model, const ObjectModel& novel,
                                      const TransferOptions& options, Rng& rng);

}  // namespace dexgrasp
