#pragma once

#include <cstdint>

namespace ergobound {

/// One-sided exact (Clopper-Pearson) upper confidence limit for a binomial
/// proportion at level 1 - delta: the p with P(Bin(n, p) <= k) = delta, or
/// 1 when k = n.
double clopper_pearson_upper(std::uint64_t k, std::uint64_t n, double delta);

/// One-sided lower limit at level 1 - delta; 0 when k = 0.
double clopper_pearson_lower(std::uint64_t k, std::uint64_t n, double delta);

} // namespace ergobound
