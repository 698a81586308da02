#pragma once

#include <nlohmann/json.hpp>

#include <optional>

namespace ergobound {

/// Inputs of the time-average tail bound. All fields must be positive.
struct BoundQuery {
    double t;
    double eps;
    double f_norm;
    double q_norm;
};

struct BoundResult {
    bool valid = false;
    double threshold = 0.0;
    std::optional<double> exponent;
    std::optional<double> bound;
    std::optional<double> theta_star;

    /// min(bound, 1) when valid, 1 otherwise.
    double effective() const;
};

/// 2 ||f|| ||Q#|| / eps: the bound holds for horizons strictly above this.
double validity_threshold(double eps, double f_norm, double q_norm);

/// P_x( (1/t) int_0^t f(X_s) ds - pi(f) >= eps ) <= exp(exponent) with
///   exponent = -2 (t eps - 2 ||f|| ||Q#||)^2 / ((t + 1) ||f||^2 (2 ||Q#|| + 1)^2),
/// valid for t > threshold. theta_star is the Chernoff parameter at which
/// the pre-optimized exponent is minimal. Throws DomainError on
/// nonpositive inputs.
BoundResult hoeffding_bound(const BoundQuery& q);

/// Occupation-time bound for the Jacobi process: ||f|| = 1, ||Q#|| <= 2 t_av.
BoundResult jacobi_occupation_bound(double t, double eps, double t_av);

/// How the tan-OU exponential-functional specialization picks its constants.
enum class ConstantMode {
    /// sup norm e^{|u| pi/2}, centering pi(f) by quadrature.
    corrected,
    /// Printed constants verbatim: e^{u pi/2} and 2 cosh(u pi/2) / (1 + u^2).
    literal,
};

struct ExpFunctionalBound {
    BoundResult result;
    double t_av = 2.0;
    double f_norm = 1.0;
    /// Centering per unit time (pi(f) in corrected mode).
    double centering_rate = 1.0;
    /// centering_rate * t, the value subtracted from int_0^t e^{u X_s} ds.
    double centering = 0.0;
};

/// Tail bound for int_0^t e^{u X_s} ds under tan-OU with rho = 1/2
/// (t_av = 2, so ||Q#|| <= 4).
ExpFunctionalBound tanou_expfunc_bound(double t, double eps, double u,
                                       ConstantMode mode = ConstantMode::corrected);

nlohmann::json to_json(const BoundResult& r);

} // namespace ergobound
