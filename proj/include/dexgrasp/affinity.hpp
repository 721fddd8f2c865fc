#pragma once

#include <vector>

#include "dexgrasp/pose.hpp"

namespace dexgrasp {

struct AffinityResult {
    std::vector<int> exemplars;    // indices of cluster centers
    std::vector<int> assignment;   // per item, index into exemplars
    bool converged = false;
    int iterations = 0;
};

/// Affinity propagation (Frey & Dueck) on a dense similarity matrix. The
/// diagonal is overwritten with `preference`. Deterministic.
AffinityResult affinity_propagation(MatX similarity, double preference, double damping,
                                    int max_iterations, double tolerance = 1e-6);

double median_off_diagonal(const MatX& similarity);

}  // namespace dexgrasp
