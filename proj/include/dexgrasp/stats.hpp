#pragma once

#include <array>

namespace dexgrasp {

/// Two-sided Fisher's exact test on a 2x2 table [[a, b], [c, d]]: sums the
/// hypergeometric probability of every table with the same margins whose
/// probability does not exceed the observed one.
double fisher_exact(const std::array<std::array<long long, 2>, 2>& table);

/// Exact two-sided McNemar test on the discordant-pair counts (b, c); p = 1
/// when b = c = 0.
double mcnemar(long long b, long long c);

}  // namespace dexgrasp
