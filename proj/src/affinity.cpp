#include "dexgrasp/affinity.hpp"

#include <algorithm>
#include <limits>

namespace dexgrasp {

AffinityResult affinity_propagation(MatX s, double preference, double damping, int max_iterations,
                                    double tolerance) {
    const int n = static_cast<int>(s.rows());
    AffinityResult res;
    if (n == 0) return res;
    for (int i = 0; i < n; ++i) s(i, i) = preference;

    MatX r = MatX::Zero(n, n), a = MatX::Zero(n, n);
    double change = std::numeric_limits<double>::infinity();
    int iter = 0;
    for (; iter < max_iterations && change > tolerance; ++iter) {
        change = 0;
        // Responsibilities.
        for (int i = 0; i < n; ++i) {
            double best = -std::numeric_limits<double>::infinity();
            double second = best;
            int best_k = -1;
            for (int k = 0; k < n; ++k) {
                const double v = a(i, k) + s(i, k);
                if (v > best) {
                    second = best;
                    best = v;
                    best_k = k;
                } else if (v > second) {
                    second = v;
                }
            }
            for (int k = 0; k < n; ++k) {
                const double target = s(i, k) - (k == best_k ? second : best);
                const double next = damping * r(i, k) + (1.0 - damping) * target;
                change = std::max(change, std::abs(next - r(i, k)));
                r(i, k) = next;
            }
        }
        // Availabilities.
        for (int k = 0; k < n; ++k) {
            double pos_sum = 0;
            for (int i = 0; i < n; ++i)
                if (i != k) pos_sum += std::max(0.0, r(i, k));
            for (int i = 0; i < n; ++i) {
                double target;
                if (i == k) {
                    target = pos_sum;
                } else {
                    target = std::min(0.0, r(k, k) + pos_sum - std::max(0.0, r(i, k)));
                }
                const double next = damping * a(i, k) + (1.0 - damping) * target;
                change = std::max(change, std::abs(next - a(i, k)));
                a(i, k) = next;
            }
        }
    }
    res.converged = change <= tolerance;
    res.iterations = iter;

    for (int k = 0; k < n; ++k)
        if (r(k, k) + a(k, k) > 0) res.exemplars.push_back(k);
    if (res.exemplars.empty()) {
        int best = 0;
        for (int k = 1; k < n; ++k)
            if (r(k, k) + a(k, k) > r(best, best) + a(best, best)) best = k;
        res.exemplars.push_back(best);
    }

    res.assignment.resize(n);
    for (int i = 0; i < n; ++i) {
        int best_c = 0;
        double best_s = -std::numeric_limits<double>::infinity();
        for (size_t c = 0; c < res.exemplars.size(); ++c) {
            if (res.exemplars[c] == i) {
                best_c = static_cast<int>(c);
                break;
            }
            if (s(i, res.exemplars[c]) > best_s) {
                best_s = s(i, res.exemplars[c]);
                best_c = static_cast<int>(c);
            }
        }
        res.assignment[i] = best_c;
    }
    return res;
}

double median_off_diagonal(const MatX& similarity) {
    std::vector<double> vals;
    const int n = static_cast<int>(similarity.rows());
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (i != j) vals.push_back(similarity(i, j));
    if (vals.empty()) return 0.0;
    std::nth_element(vals.begin(), vals.begin() + vals.size() / 2, vals.end());
    return vals[vals.size() / 2];
}

}  // namespace dexgrasp
