#pragma once

#include <functional>
#include <string>

namespace ergobound::quad {

using Integrand = std::function<double(double)>;

struct Tolerance {
    double abs = 1e-10;
    double rel = 1e-8;
};

struct Result {
    double value = 0.0;
    double abs_error = 0.0;
    int evaluations = 0;
    int intervals = 0;
    bool converged = false;
};

/// Globally adaptive 7/15-point Gauss-Kronrod quadrature on a finite [a, b].
///
/// Nodes are strictly interior, so integrable endpoint singularities are
/// tolerated; bisection concentrates geometrically toward them. The
/// interval with the largest error estimate is always split next.
Result gauss_kronrod(const Integrand& f, double a, double b, Tolerance tol = {},
                     int max_intervals = 4000);

/// Same as gauss_kronrod but throws NumericalError when the tolerance is not met.
double integrate(const Integrand& f, double a, double b, Tolerance tol = {},
                 int max_intervals = 4000);

/// Which endpoints of an integration range need exhaustion.
enum class Ends { none, lower, upper, both };

struct ExhaustionOptions {
    Tolerance tol{};
    /// Tolerance for each piece handed to gauss_kronrod.
    Tolerance piece_tol{1e-14, 1e-12};
    /// Cap on halvings toward a finite endpoint.
    int max_rounds_finite = 60;
    /// Cap on doublings toward an infinite endpoint.
    int max_rounds_infinite = 400;
    /// Consecutive non-shrinking rounds that declare divergence.
    int divergence_rounds = 8;
    /// Increment ratios at or above this value count as non-shrinking.
    /// 2^-0.01: a power-law tail slower than x^-0.01 per doubling is
    /// treated as divergent.
    double divergence_ratio = 0.9930924954370359;
    /// Maximum change between consecutive increment ratios before a
    /// geometric tail extrapolation is trusted.
    double ratio_stability = 1e-7;
    /// Length scale for the core segment when an endpoint is infinite.
    double scale = 1.0;
};

struct ImproperResult {
    double value = 0.0;
    double abs_error = 0.0;
    bool divergent = false;
    /// Largest number of exhaustion rounds used on either side.
    int rounds = 0;
    /// Geometric tail added by extrapolation (both sides combined).
    double extrapolated_tail = 0.0;
};

/// Integral over (lower, upper) where the flagged endpoints may be infinite
/// or carry integrable singularities.
///
/// A core segment is integrated directly; each flagged side is then
/// exhausted by pieces that halve the distance to a finite endpoint or
/// double the distance toward an infinite one. The running increments are
/// monitored: when their ratio settles below `divergence_ratio` the
/// remaining tail is summed as a geometric series; when the ratio stays at
/// or above it for `divergence_rounds` rounds the integral is reported
/// divergent.
ImproperResult integrate_improper(const Integrand& f, double lower, double upper,
                                  const ExhaustionOptions& opts = {}, Ends ends = Ends::both);

/// integrate_improper that throws NumericalError on divergence.
double integrate_improper_value(const Integrand& f, double lower, double upper,
                                const ExhaustionOptions& opts = {}, Ends ends = Ends::both);

} // namespace ergobound::quad
