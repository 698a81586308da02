#include "ergobound/models.hpp"

#include "ergobound/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace ergobound {

namespace {

constexpr double kPi = std::numbers::pi;

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::string format_params(const char* name, std::initializer_list<std::pair<const char*, double>> params) {
    std::ostringstream os;
    os << name << '(';
    bool first = true;
    for (const auto& [k, v] : params) {
        if (!first) os << ',';
        os << k << '=' << v;
        first = false;
    }
    os << ')';
    return os.str();
}

double log_beta(double p, double q) { return std::lgamma(p) + std::lgamma(q) - std::lgamma(p + q); }

// Unnormalized log scale density of the closed forms (reference point not applied).
double raw_log_scale(const ClosedForm& cf, double x) {
    return std::visit(
        overloaded{
            [](std::monostate) { return 0.0; },
            [x](const JacobiParams& p) {
                return -(2.0 * p.a / p.sigma2) * std::log(x) -
                       (2.0 * (p.b - p.a) / p.sigma2) * std::log1p(-x);
            },
            [x](const TanOUParams& p) { return -2.0 * p.rho * std::log(std::cos(x)); },
            [](const MaoClassParams&) { return 0.0; },
        },
        cf);
}

} // namespace

bool StateInterval::bounded() const { return std::isfinite(lower) && std::isfinite(upper); }

double DiffusionSpec::default_reference_point(const StateInterval& interval) {
    if (interval.bounded()) return 0.5 * (interval.lower + interval.upper);
    if (std::isfinite(interval.lower)) return interval.lower + 1.0;
    if (std::isfinite(interval.upper)) return interval.upper - 1.0;
    return 0.0;
}

DiffusionSpec::DiffusionSpec(StateInterval interval, ScalarFn drift, ScalarFn diffusion_sq,
                             std::optional<double> reference_point, std::string name)
    : interval_(interval),
      drift_(std::move(drift)),
      diffusion_sq_(std::move(diffusion_sq)),
      reference_point_(reference_point.value_or(default_reference_point(interval))),
      name_(std::move(name)) {
    if (!(interval_.lower < interval_.upper)) {
        throw DomainError("state interval requires lower < upper");
    }
    if (!drift_ || !diffusion_sq_) {
        throw DomainError("drift and diffusion coefficient must be callable");
    }
    if (!interval_.contains(reference_point_)) {
        throw DomainError("reference point must lie inside the state interval");
    }
    if (interval_.lower_boundary == Boundary::reflecting && !std::isfinite(interval_.lower)) {
        throw DomainError("a reflecting boundary must be finite");
    }
    if (interval_.upper_boundary == Boundary::reflecting && !std::isfinite(interval_.upper)) {
        throw DomainError("a reflecting boundary must be finite");
    }
    for (double x : spot_check_grid(interval_, 1000)) {
        const double v = diffusion_sq_(x);
        if (!(v > 0.0) || !std::isfinite(v)) {
            std::ostringstream msg;
            msg << "diffusion coefficient must be positive on the open interval; sigma^2(" << x
                << ") = " << v;
            throw DomainError(msg.str());
        }
    }
}

DiffusionSpec DiffusionSpec::jacobi(double a, double b, double sigma2) {
    if (!(b > a && a > 0.0)) throw DomainError("Jacobi model requires b > a > 0");
    if (!(sigma2 > 0.0) || !std::isfinite(sigma2)) throw DomainError("Jacobi model requires sigma2 > 0");
    StateInterval iv{0.0, 1.0, Boundary::inaccessible, Boundary::inaccessible};
    DiffusionSpec spec(
        iv, [a, b](double x) { return a - b * x; },
        [sigma2](double x) { return sigma2 * x * (1.0 - x); }, std::nullopt,
        format_params("jacobi", {{"a", a}, {"b", b}, {"sigma2", sigma2}}));
    spec.closed_form_ = JacobiParams{a, b, sigma2};
    return spec;
}

DiffusionSpec DiffusionSpec::tan_ou(double rho) {
    if (!(rho >= 0.5) || !std::isfinite(rho)) throw DomainError("tan-OU model requires rho >= 1/2");
    StateInterval iv{-kPi / 2.0, kPi / 2.0, Boundary::inaccessible, Boundary::inaccessible};
    DiffusionSpec spec(
        iv, [rho](double x) { return -rho * std::tan(x); }, [](double) { return 1.0; },
        std::nullopt, format_params("tanou", {{"rho", rho}}));
    spec.closed_form_ = TanOUParams{rho};
    return spec;
}

DiffusionSpec DiffusionSpec::mao_class(double gamma) {
    if (!(gamma > 2.0) || !std::isfinite(gamma)) throw DomainError("Mao-class model requires gamma > 2");
    StateInterval iv{0.0, std::numeric_limits<double>::infinity(), Boundary::reflecting,
                     Boundary::inaccessible};
    DiffusionSpec spec(
        iv, [](double) { return 0.0; },
        [gamma](double x) { return 2.0 * std::pow(1.0 + x, gamma); }, std::nullopt,
        format_params("maoclass", {{"gamma", gamma}}));
    spec.closed_form_ = MaoClassParams{gamma};
    return spec;
}

DiffusionSpec DiffusionSpec::with_reference_point(double x0) const {
    if (!interval_.contains(x0)) throw DomainError("reference point must lie inside the state interval");
    DiffusionSpec copy = *this;
    copy.reference_point_ = x0;
    return copy;
}

DiffusionSpec DiffusionSpec::without_closed_form() const {
    DiffusionSpec copy = *this;
    copy.closed_form_ = std::monostate{};
    copy.name_ = name_ + "[quadrature]";
    return copy;
}

DiffusionSpec DiffusionSpec::with_boundaries(Boundary lower, Boundary upper) const {
    StateInterval iv = interval_;
    iv.lower_boundary = lower;
    iv.upper_boundary = upper;
    if ((lower == Boundary::reflecting && !std::isfinite(iv.lower)) ||
        (upper == Boundary::reflecting && !std::isfinite(iv.upper))) {
        throw DomainError("a reflecting boundary must be finite");
    }
    DiffusionSpec copy = *this;
    copy.interval_ = iv;
    return copy;
}

// ---------------------------------------------------------------------------
// Observables

Observable Observable::constant(double c) {
    std::ostringstream label;
    label << "const(" << c << ")";
    return Observable{[c](double) { return c; }, std::fabs(c), label.str(), {}};
}

Observable Observable::indicator(double lo, double hi) {
    if (!(lo < hi)) throw DomainError("indicator requires lo < hi");
    std::ostringstream label;
    label << "indicator(" << lo << "," << hi << ")";
    std::vector<double> breaks;
    if (std::isfinite(lo)) breaks.push_back(lo);
    if (std::isfinite(hi)) breaks.push_back(hi);
    return Observable{[lo, hi](double x) { return (x > lo && x < hi) ? 1.0 : 0.0; }, 1.0,
                      label.str(), breaks};
}

Observable Observable::exponential(double u, const StateInterval& interval) {
    if ((u > 0.0 && !std::isfinite(interval.upper)) || (u < 0.0 && !std::isfinite(interval.lower))) {
        throw DomainError("exp(u x) is unbounded on this interval");
    }
    double sup = 1.0;
    if (u > 0.0) sup = std::exp(u * interval.upper);
    if (u < 0.0) sup = std::exp(u * interval.lower);
    std::ostringstream label;
    label << "exp(" << u << "x)";
    return Observable{[u](double x) { return std::exp(u * x); }, sup, label.str(), {}};
}

Observable Observable::identity(const StateInterval& interval) {
    if (!interval.bounded()) throw DomainError("f(x) = x is unbounded on this interval");
    const double sup = std::max(std::fabs(interval.lower), std::fabs(interval.upper));
    return Observable{[](double x) { return x; }, sup, "x", {}};
}

Observable Observable::sine() { return Observable{[](double x) { return std::sin(x); }, 1.0, "sin(x)", {}}; }

std::vector<double> spot_check_grid(const StateInterval& iv, std::size_t n) {
    std::vector<double> xs;
    xs.reserve(n);
    const bool lo_fin = std::isfinite(iv.lower);
    const bool hi_fin = std::isfinite(iv.upper);
    for (std::size_t i = 0; i < n; ++i) {
        const double frac = (static_cast<double>(i) + 0.5) / static_cast<double>(n);
        double x = 0.0;
        if (lo_fin && hi_fin) {
            const double c = 0.5 * (iv.lower + iv.upper);
            const double h = 0.5 * (iv.upper - iv.lower);
            x = c - h * std::cos(kPi * frac);
        } else if (lo_fin) {
            x = iv.lower + std::tan(0.5 * kPi * frac);
        } else if (hi_fin) {
            x = iv.upper - std::tan(0.5 * kPi * (1.0 - frac));
        } else {
            x = std::tan(kPi * (frac - 0.5));
        }
        if (iv.contains(x)) xs.push_back(x);
    }
    return xs;
}

void validate_observable(const DiffusionSpec& spec, const Observable& f) {
    if (!f.fn) throw DomainError("observable has no function");
    if (!(f.sup_norm >= 0.0) || !std::isfinite(f.sup_norm)) {
        throw DomainError("observable sup norm must be finite and nonnegative");
    }
    const double slack = f.sup_norm * 1e-12;
    for (double x : spot_check_grid(spec.interval(), 10000)) {
        const double v = f(x);
        if (!std::isfinite(v) || std::fabs(v) > f.sup_norm + slack) {
            std::ostringstream msg;
            msg << "observable " << f.label << " violates its declared sup norm " << f.sup_norm
                << ": |f(" << x << ")| = " << std::fabs(v);
            throw DomainError(msg.str());
        }
    }
}

// ---------------------------------------------------------------------------
// Scale and speed

double log_scale_density(const DiffusionSpec& spec, double x) {
    if (!spec.interval().contains(x)) {
        throw DomainError("scale density requested outside the open interval");
    }
    const double x0 = spec.reference_point();
    if (x == x0) return 0.0;
    if (spec.has_closed_form()) {
        return raw_log_scale(spec.closed_form(), x) - raw_log_scale(spec.closed_form(), x0);
    }
    const auto& mu = spec.drift_fn();
    const auto& s2 = spec.diffusion_sq_fn();
    const quad::Result r = quad::gauss_kronrod(
        [&](double z) { return 2.0 * mu(z) / s2(z); }, x0, x, quad::Tolerance{1e-11, 1e-12});
    if (!r.converged || !std::isfinite(r.value)) {
        std::ostringstream msg;
        msg << "scale density quadrature failed between " << x0 << " and " << x
            << " (error estimate " << r.abs_error << ", " << r.intervals << " intervals)";
        throw NumericalError(msg.str());
    }
    return -r.value;
}

double scale_density(const DiffusionSpec& spec, double x) { return std::exp(log_scale_density(spec, x)); }

double log_speed_density(const DiffusionSpec& spec, double x) {
    return std::log(2.0) - std::log(spec.diffusion_sq(x)) - log_scale_density(spec, x);
}

double speed_density(const DiffusionSpec& spec, double x) { return std::exp(log_speed_density(spec, x)); }

double integrate_over_interval(const quad::Integrand& g, const StateInterval& iv,
                               const std::vector<double>& breakpoints,
                               const quad::ExhaustionOptions& opts) {
    std::vector<double> cuts;
    for (double b : breakpoints) {
        if (iv.contains(b)) cuts.push_back(b);
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    if (cuts.empty()) {
        return quad::integrate_improper_value(g, iv.lower, iv.upper, opts, quad::Ends::both);
    }
    double total = quad::integrate_improper_value(g, iv.lower, cuts.front(), opts, quad::Ends::lower);
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        total += quad::integrate(g, cuts[i], cuts[i + 1], opts.piece_tol);
    }
    total += quad::integrate_improper_value(g, cuts.back(), iv.upper, opts, quad::Ends::upper);
    return total;
}

quad::ImproperResult total_speed_measure(const DiffusionSpec& spec) {
    return quad::integrate_improper([&](double x) { return speed_density(spec, x); },
                                    spec.interval().lower, spec.interval().upper);
}

// ---------------------------------------------------------------------------
// Stationary law

StationaryLaw::StationaryLaw(const DiffusionSpec& spec) : spec_(spec), total_speed_(0.0), log_total_speed_(0.0) {
    const double x0 = spec.reference_point();
    const double log_sx0 = raw_log_scale(spec.closed_form(), x0);
    std::visit(overloaded{
                   [&](std::monostate) {
                       const quad::ImproperResult r = total_speed_measure(spec_);
                       if (r.divergent || !(r.value > 0.0) || !std::isfinite(r.value)) {
                           throw DomainError("no stationary density: the speed measure has infinite mass");
                       }
                       total_speed_ = r.value;
                       log_total_speed_ = std::log(r.value);
                   },
                   [&](const JacobiParams& p) {
                       const double pa = 2.0 * p.a / p.sigma2;
                       const double qb = 2.0 * (p.b - p.a) / p.sigma2;
                       log_total_speed_ = std::log(2.0 / p.sigma2) + log_sx0 + log_beta(pa, qb);
                       total_speed_ = std::exp(log_total_speed_);
                   },
                   [&](const TanOUParams& p) {
                       const double z = std::sqrt(kPi) * std::exp(std::lgamma(p.rho + 0.5) -
                                                                  std::lgamma(p.rho + 1.0));
                       log_total_speed_ = std::log(2.0 * z) + log_sx0;
                       total_speed_ = std::exp(log_total_speed_);
                   },
                   [&](const MaoClassParams& p) {
                       total_speed_ = 1.0 / (p.gamma - 1.0);
                       log_total_speed_ = std::log(total_speed_);
                   },
               },
               spec.closed_form());
}

double StationaryLaw::density(double x) const {
    if (!spec_.interval().contains(x)) return 0.0;
    return std::visit(
        overloaded{
            [&](std::monostate) { return std::exp(log_speed_density(spec_, x) - log_total_speed_); },
            [x](const JacobiParams& p) {
                const double pa = 2.0 * p.a / p.sigma2;
                const double qb = 2.0 * (p.b - p.a) / p.sigma2;
                return std::exp((pa - 1.0) * std::log(x) + (qb - 1.0) * std::log1p(-x) -
                                log_beta(pa, qb));
            },
            [x](const TanOUParams& p) {
                const double log_z = 0.5 * std::log(kPi) + std::lgamma(p.rho + 0.5) - std::lgamma(p.rho + 1.0);
                return std::exp(2.0 * p.rho * std::log(std::cos(x)) - log_z);
            },
            [x](const MaoClassParams& p) { return (p.gamma - 1.0) * std::pow(1.0 + x, -p.gamma); },
        },
        spec_.closed_form());
}

double stationary_density(const DiffusionSpec& spec, double x) { return StationaryLaw(spec).density(x); }

double pi_integral(const StationaryLaw& law, const Observable& f) {
    return integrate_over_interval([&](double x) { return f(x) * law.density(x); },
                                   law.spec().interval(), f.breakpoints);
}

double pi_integral(const DiffusionSpec& spec, const Observable& f) { return pi_integral(StationaryLaw(spec), f); }

} // namespace ergobound
