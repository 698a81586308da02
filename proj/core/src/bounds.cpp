#include "ergobound/bounds.hpp"

#include "ergobound/errors.hpp"
#include "ergobound/ergodicity.hpp"
#include "ergobound/models.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace ergobound {

namespace {

void require_positive(double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) {
        throw DomainError(std::string(name) + " must be positive and finite");
    }
}

} // namespace

double BoundResult::effective() const { return valid && bound ? std::min(*bound, 1.0) : 1.0; }

double validity_threshold(double eps, double f_norm, double q_norm) {
    require_positive(eps, "eps");
    require_positive(f_norm, "f_norm");
    require_positive(q_norm, "q_norm");
    return 2.0 * f_norm * q_norm / eps;
}

BoundResult hoeffding_bound(const BoundQuery& q) {
    require_positive(q.t, "t");
    BoundResult r;
    r.threshold = validity_threshold(q.eps, q.f_norm, q.q_norm);
    r.valid = q.t > r.threshold;
    if (!r.valid) return r;

    const double gap = q.t * q.eps - 2.0 * q.f_norm * q.q_norm;
    const double spread = 2.0 * q.q_norm + 1.0;
    const double denom = (q.t + 1.0) * q.f_norm * q.f_norm * spread * spread;
    r.exponent = -2.0 * gap * gap / denom;
    r.bound = std::exp(*r.exponent);
    r.theta_star = 4.0 * gap / denom;
    return r;
}

BoundResult jacobi_occupation_bound(double t, double eps, double t_av) {
    return hoeffding_bound({t, eps, 1.0, q_sharp_norm_bound(t_av)});
}

ExpFunctionalBound tanou_expfunc_bound(double t, double eps, double u, ConstantMode mode) {
    constexpr double half_pi = std::numbers::pi / 2.0;
    if (!std::isfinite(u)) throw DomainError("u must be finite");
    ExpFunctionalBound out;
    // sum_i 2 / (i (i + 1)) telescopes to exactly 2.
    out.t_av = 2.0;
    const double q_norm = q_sharp_norm_bound(out.t_av);
    if (mode == ConstantMode::literal) {
        out.f_norm = std::exp(u * half_pi);
        out.centering_rate = 2.0 * std::cosh(u * half_pi) / (1.0 + u * u);
    } else {
        out.f_norm = std::exp(std::fabs(u) * half_pi);
        const DiffusionSpec spec = DiffusionSpec::tan_ou(0.5);
        out.centering_rate = pi_integral(spec, Observable::exponential(u, spec.interval()));
    }
    out.centering = out.centering_rate * t;
    out.result = hoeffding_bound({t, eps, out.f_norm, q_norm});
    return out;
}

nlohmann::json to_json(const BoundResult& r) {
    auto opt = [](const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); };
    return {
        {"valid", r.valid},
        {"threshold", r.threshold},
        {"exponent", opt(r.exponent)},
        {"bound", opt(r.bound)},
        {"bound_effective", r.effective()},
        {"theta_star", opt(r.theta_star)},
    };
}

} // namespace ergobound
