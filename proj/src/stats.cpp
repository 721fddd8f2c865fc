#include "dexgrasp/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dexgrasp {

namespace {

double log_factorial(long long n) { return std::lgamma(static_cast<double>(n) + 1.0); }

/// log P(a | margins) for the table [[a, r1-a], [c1-a, ...]].
double log_hypergeometric(long long a, long long r1, long long r2, long long c1, long long n) {
    return log_factorial(r1) + log_factorial(r2) + log_factorial(c1) + log_factorial(n - c1) -
           log_factorial(n) - log_factorial(a) - log_factorial(r1 - a) - log_factorial(c1 - a) -
           log_factorial(r2 - c1 + a);
}

}  // namespace

double fisher_exact(const std::array<std::array<long long, 2>, 2>& table) {
    const long long a = table[0][0], b = table[0][1], c = table[1][0], d = table[1][1];
    if (a < 0 || b < 0 || c < 0 || d < 0)
        throw std::invalid_argument("fisher_exact: negative count");
    const long long r1 = a + b, r2 = c + d, c1 = a + c, n = r1 + r2;
    if (n == 0) return 1.0;

    const double log_observed = log_hypergeometric(a, r1, r2, c1, n);
    const long long lo = std::max(0LL, c1 - r2), hi = std::min(r1, c1);
    double p = 0;
    for (long long k = lo; k <= hi; ++k) {
        const double lp = log_hypergeometric(k, r1, r2, c1, n);
        if (lp <= log_observed + 1e-7) p += std::exp(lp);
    }
    return std::min(p, 1.0);
}

double mcnemar(long long b, long long c) {
    if (b < 0 || c < 0) throw std::invalid_argument("mcnemar: negative count");
    const long long n = b + c;
    if (n == 0) return 1.0;
    const long long k = std::min(b, c);
    // Two-sided exact binomial with p = 1/2.
    double tail = 0;
    for (long long i = 0; i <= k; ++i)
        tail += std::exp(log_factorial(n) - log_factorial(i) - log_factorial(n - i) -
                         n * std::log(2.0));
    return std::min(1.0, 2.0 * tail);
}

}  // namespace dexgrasp
