#include "ergobound/binomial.hpp"

#include "ergobound/errors.hpp"

#include <boost/math/special_functions/beta.hpp>

namespace ergobound {

namespace {

void check(std::uint64_t k, std::uint64_t n, double delta) {
    if (n == 0) throw DomainError("binomial confidence limit needs n > 0");
    if (k > n) throw DomainError("binomial confidence limit needs k <= n");
    if (!(delta > 0.0 && delta < 1.0)) throw DomainError("delta must lie in (0, 1)");
}

} // namespace

double clopper_pearson_upper(std::uint64_t k, std::uint64_t n, double delta) {
    check(k, n, delta);
    if (k == n) return 1.0;
    return boost::math::ibeta_inv(static_cast<double>(k + 1), static_cast<double>(n - k), 1.0 - delta);
}

double clopper_pearson_lower(std::uint64_t k, std::uint64_t n, double delta) {
    check(k, n, delta);
    if (k == 0) return 0.0;
    return boost::math::ibeta_inv(static_cast<double>(k), static_cast<double>(n - k + 1), delta);
}

} // namespace ergobound
