#pragma once

#include "dexgrasp/pose.hpp"

namespace dexgrasp {

struct LpResult {
    bool feasible = false;
    bool bounded = true;
    VecX x;
    double objective = 0;  // c^T x at the optimum
};

/// Dense two-phase simplex for
///   maximize c^T x  subject to  A x = b, x >= 0.
/// Bland's rule, so it terminates on degenerate problems.
LpResult solve_lp(const MatX& A, const VecX& b, const VecX& c, int max_iterations = 20000);

}  // namespace dexgrasp
