#pragma once

#include "ergobound/quadrature.hpp"

#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace ergobound {

using ScalarFn = std::function<double(double)>;

enum class Boundary { reflecting, inaccessible };

/// Open state interval (lower, upper); either endpoint may be infinite.
struct StateInterval {
    double lower = 0.0;
    double upper = 1.0;
    Boundary lower_boundary = Boundary::inaccessible;
    Boundary upper_boundary = Boundary::inaccessible;

    bool contains(double x) const { return x > lower && x < upper; }
    bool bounded() const;
    double width() const { return upper - lower; }
};

// Closed-form model tags. Parameters follow the generator
//   A = mu(x) d/dx + (1/2) sigma^2(x) d^2/dx^2.

/// Drift a - b x, diffusion coefficient sigma2 x (1 - x) on (0, 1); b > a > 0.
struct JacobiParams {
    double a;
    double b;
    double sigma2;

    double alpha() const { return 2.0 * b / sigma2 - 2.0 * a / sigma2 - 1.0; }
    double beta() const { return 2.0 * a / sigma2 - 1.0; }
};

/// Drift -rho tan(x), unit diffusion coefficient on (-pi/2, pi/2); rho >= 1/2.
struct TanOUParams {
    double rho;
};

/// Zero drift, diffusion coefficient 2 (1 + x)^gamma on (0, inf); gamma > 2.
struct MaoClassParams {
    double gamma;
};

using ClosedForm = std::variant<std::monostate, JacobiParams, TanOUParams, MaoClassParams>;

/// A one-dimensional diffusion: coefficients on a state interval plus a
/// reference point for the scale function. Immutable after construction.
class DiffusionSpec {
public:
    DiffusionSpec(StateInterval interval, ScalarFn drift, ScalarFn diffusion_sq,
                  std::optional<double> reference_point = std::nullopt,
                  std::string name = "custom");

    static DiffusionSpec jacobi(double a, double b, double sigma2);
    static DiffusionSpec tan_ou(double rho);
    static DiffusionSpec mao_class(double gamma);

    /// Copy with a different scale-function reference point.
    DiffusionSpec with_reference_point(double x0) const;
    /// Copy that forgets its closed form, forcing the quadrature paths.
    DiffusionSpec without_closed_form() const;
    /// Copy with different boundary classifications.
    DiffusionSpec with_boundaries(Boundary lower, Boundary upper) const;

    const StateInterval& interval() const { return interval_; }
    double drift(double x) const { return drift_(x); }
    double diffusion_sq(double x) const { return diffusion_sq_(x); }
    const ScalarFn& drift_fn() const { return drift_; }
    const ScalarFn& diffusion_sq_fn() const { return diffusion_sq_; }
    double reference_point() const { return reference_point_; }
    const ClosedForm& closed_form() const { return closed_form_; }
    bool has_closed_form() const { return !std::holds_alternative<std::monostate>(closed_form_); }
    const std::string& name() const { return name_; }

    /// Default reference point: midpoint, or lower + 1 when upper is infinite.
    static double default_reference_point(const StateInterval& interval);

private:
    StateInterval interval_;
    ScalarFn drift_;
    ScalarFn diffusion_sq_;
    double reference_point_;
    ClosedForm closed_form_;
    std::string name_;
};

/// A bounded observable f with its declared sup norm. Discontinuity
/// locations, when known, are used as quadrature breakpoints.
struct Observable {
    ScalarFn fn;
    double sup_norm = 1.0;
    std::string label = "f";
    std::vector<double> breakpoints{};

    double operator()(double x) const { return fn(x); }

    static Observable constant(double c);
    static Observable indicator(double lo, double hi);
    static Observable exponential(double u, const StateInterval& interval);
    static Observable identity(const StateInterval& interval);
    static Observable sine();
};

/// Spot-checks |f(x)| <= sup_norm on a 10^4-point interior grid. Throws
/// DomainError on violation.
void validate_observable(const DiffusionSpec& spec, const Observable& f);

/// Points strictly inside the interval, clustered toward finite endpoints;
/// infinite intervals are mapped through tan.
std::vector<double> spot_check_grid(const StateInterval& interval, std::size_t n);

/// log s(x) = -int_{x0}^x 2 mu / sigma^2.
double log_scale_density(const DiffusionSpec& spec, double x);
/// s(x), equal to 1 at the reference point.
double scale_density(const DiffusionSpec& spec, double x);
/// log m(x) = log 2 - log sigma^2(x) - log s(x).
double log_speed_density(const DiffusionSpec& spec, double x);
/// m(x) = 2 / (sigma^2(x) s(x)).
double speed_density(const DiffusionSpec& spec, double x);

/// Total speed measure M(l, u); divergent when the improper integral is.
quad::ImproperResult total_speed_measure(const DiffusionSpec& spec);

/// Normalized speed density. Construction computes the normalizer once.
class StationaryLaw {
public:
    explicit StationaryLaw(const DiffusionSpec& spec);

    double density(double x) const;
    double total_speed() const { return total_speed_; }
    const DiffusionSpec& spec() const { return spec_; }

private:
    DiffusionSpec spec_;
    double total_speed_;
    double log_total_speed_;
};

double stationary_density(const DiffusionSpec& spec, double x);

/// pi(f) by quadrature against the stationary density.
double pi_integral(const StationaryLaw& law, const Observable& f);
double pi_integral(const DiffusionSpec& spec, const Observable& f);

/// Integrates g over the open interval with breakpoints; endpoints are
/// exhausted as improper. Shared by pi_integral and the Poisson solver.
double integrate_over_interval(const quad::Integrand& g, const StateInterval& interval,
                               const std::vector<double>& breakpoints,
                               const quad::ExhaustionOptions& opts = {});

} // namespace ergobound
