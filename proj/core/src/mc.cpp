#include "ergobound/mc.hpp"

#include "ergobound/binomial.hpp"
#include "ergobound/errors.hpp"
#include "ergobound/poisson.hpp"
#include "ergobound/rng.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>

namespace ergobound {

namespace {

// Coefficient adaptors so the stepping loop inlines the built-in models.
struct GenericCoeffs {
    const ScalarFn* mu;
    const ScalarFn* s2;
    double drift(double x) const { return (*mu)(x); }
    double diffusion_sq(double x) const { return (*s2)(x); }
};

struct JacobiCoeffs {
    double a, b, sigma2;
    double drift(double x) const { return a - b * x; }
    double diffusion_sq(double x) const { return sigma2 * x * (1.0 - x); }
};

struct TanOUCoeffs {
    double rho;
    double drift(double x) const { return -rho * std::tan(x); }
    double diffusion_sq(double) const { return 1.0; }
};

struct MaoCoeffs {
    double gamma;
    double drift(double) const { return 0.0; }
    double diffusion_sq(double x) const { return 2.0 * std::pow(1.0 + x, gamma); }
};

template <class Fn>
decltype(auto) with_coeffs(const DiffusionSpec& spec, Fn&& fn) {
    const ClosedForm& cf = spec.closed_form();
    if (const auto* p = std::get_if<JacobiParams>(&cf)) return fn(JacobiCoeffs{p->a, p->b, p->sigma2});
    if (const auto* p = std::get_if<TanOUParams>(&cf)) return fn(TanOUCoeffs{p->rho});
    if (const auto* p = std::get_if<MaoClassParams>(&cf)) return fn(MaoCoeffs{p->gamma});
    return fn(GenericCoeffs{&spec.drift_fn(), &spec.diffusion_sq_fn()});
}

class BoundaryMap {
public:
    BoundaryMap(const StateInterval& iv, BoundaryPolicy policy)
        : lo_(iv.lower),
          hi_(iv.upper),
          lo_fin_(std::isfinite(iv.lower)),
          hi_fin_(std::isfinite(iv.upper)),
          policy_(policy) {}

    double apply(double x) const {
        if (policy_.kind == BoundaryPolicy::Kind::reflect) {
            if ((lo_fin_ && x < lo_) || (hi_fin_ && x > hi_)) {
                if (lo_fin_ && hi_fin_) {
                    const double w = hi_ - lo_;
                    double y = std::fmod(x - lo_, 2.0 * w);
                    if (y < 0.0) y += 2.0 * w;
                    x = y <= w ? lo_ + y : hi_ - (y - w);
                } else if (lo_fin_) {
                    x = 2.0 * lo_ - x;
                } else {
                    x = 2.0 * hi_ - x;
                }
            }
        } else {
            const double d = policy_.delta;
            if (d == 0.0 && ((lo_fin_ && x <= lo_) || (hi_fin_ && x >= hi_))) {
                std::ostringstream msg;
                msg << "path left the state interval at x = " << x << " under clamp(0)";
                throw NumericalError(msg.str());
            }
            if (lo_fin_ && x < lo_ + d) x = lo_ + d;
            if (hi_fin_ && x > hi_ - d) x = hi_ - d;
        }
        if (!std::isfinite(x)) throw NumericalError("simulated state is not finite");
        return x;
    }

private:
    double lo_;
    double hi_;
    bool lo_fin_;
    bool hi_fin_;
    BoundaryPolicy policy_;
};

template <class Coeffs>
inline double em_step(const Coeffs& c, double x, double dt, double sqrt_dt, double z) {
    const double s2 = c.diffusion_sq(x);
    return x + c.drift(x) * dt + std::sqrt(s2 > 0.0 ? s2 : 0.0) * sqrt_dt * z;
}

std::uint64_t step_count(double t, double dt) {
    const double n = std::llround(t / dt);
    if (n < 1.0) throw DomainError("time span shorter than one step");
    return static_cast<std::uint64_t>(n);
}

// Runs body(i) for every path index; each worker takes a strided subset.
// Results must be written to per-index slots so that the outcome does not
// depend on the number of threads.
template <class Body>
void for_each_path(std::uint64_t n_paths, unsigned threads, Body&& body) {
    const unsigned workers = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(
                                                                          std::min<std::uint64_t>(n_paths, 1u << 16))));
    if (workers == 1) {
        for (std::uint64_t i = 0; i < n_paths; ++i) body(i);
        return;
    }
    std::exception_ptr first_error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (std::uint64_t i = w; i < n_paths; i += workers) body(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

} // namespace

void validate(const SimConfig& cfg, const DiffusionSpec& spec) {
    if (!(cfg.dt > 0.0) || !std::isfinite(cfg.dt)) throw DomainError("dt must be positive");
    if (!(cfg.t_horizon > 0.0) || !std::isfinite(cfg.t_horizon)) throw DomainError("t_horizon must be positive");
    if (cfg.dt > cfg.t_horizon) throw DomainError("dt must not exceed t_horizon");
    if (cfg.n_paths == 0) throw DomainError("n_paths must be positive");
    const StateInterval& iv = spec.interval();
    if (cfg.boundary.kind == BoundaryPolicy::Kind::reflect && !std::isfinite(iv.lower) &&
        !std::isfinite(iv.upper)) {
        throw DomainError("reflect policy needs a finite boundary");
    }
    if (cfg.boundary.kind == BoundaryPolicy::Kind::clamp) {
        if (!(cfg.boundary.delta >= 0.0)) throw DomainError("clamp margin must be nonnegative");
        if (iv.bounded() && !(2.0 * cfg.boundary.delta < iv.width())) {
            throw DomainError("clamp margin leaves no room inside the interval");
        }
    }
    if (cfg.x0 && !iv.contains(*cfg.x0)) throw DomainError("x0 must lie inside the open interval");
}

double start_point(const SimConfig& cfg, const DiffusionSpec& spec) {
    return cfg.x0.value_or(DiffusionSpec::default_reference_point(spec.interval()));
}

std::vector<double> sample_path(const DiffusionSpec& spec, const SimConfig& cfg, std::uint64_t path_index) {
    validate(cfg, spec);
    const std::uint64_t n = step_count(cfg.t_horizon, cfg.dt);
    const BoundaryMap boundary(spec.interval(), cfg.boundary);
    return with_coeffs(spec, [&](const auto& coeffs) {
        PathStream rng(cfg.seed, path_index);
        const double sqrt_dt = std::sqrt(cfg.dt);
        std::vector<double> xs;
        xs.reserve(n + 1);
        double x = start_point(cfg, spec);
        xs.push_back(x);
        for (std::uint64_t k = 0; k < n; ++k) {
            x = boundary.apply(em_step(coeffs, x, cfg.dt, sqrt_dt, rng.normal()));
            xs.push_back(x);
        }
        return xs;
    });
}

std::vector<double> simulate_functional(const DiffusionSpec& spec, const Observable& f, const SimConfig& cfg,
                                        std::uint64_t path_index, std::span<const double> checkpoints) {
    validate(cfg, spec);
    if (path_index >= cfg.n_paths) throw DomainError("path index out of range");
    if (checkpoints.empty()) throw DomainError("at least one checkpoint is required");
    std::vector<std::uint64_t> marks;
    marks.reserve(checkpoints.size());
    for (double t : checkpoints) {
        if (!(t > 0.0) || t > cfg.t_horizon * (1.0 + 1e-12)) {
            throw DomainError("checkpoints must lie in (0, t_horizon]");
        }
        const std::uint64_t m = step_count(t, cfg.dt);
        if (!marks.empty() && m <= marks.back()) throw DomainError("checkpoints must be increasing");
        marks.push_back(m);
    }

    const BoundaryMap boundary(spec.interval(), cfg.boundary);
    return with_coeffs(spec, [&](const auto& coeffs) {
        PathStream rng(cfg.seed, path_index);
        const double sqrt_dt = std::sqrt(cfg.dt);
        std::vector<double> out;
        out.reserve(marks.size());

        double x = start_point(cfg, spec);
        const double f0 = f(x);
        // Trapezoid rule on deviations from f(X_0): a constant f is reproduced exactly.
        double running = 0.0;
        std::size_t next = 0;
        const std::uint64_t last = marks.back();
        for (std::uint64_t k = 1; k <= last; ++k) {
            x = boundary.apply(em_step(coeffs, x, cfg.dt, sqrt_dt, rng.normal()));
            const double dev = f(x) - f0;
            running += dev;
            if (k == marks[next]) {
                const double trapezoid = running - 0.5 * dev;
                out.push_back(f0 + trapezoid / static_cast<double>(k));
                ++next;
            }
        }
        return out;
    });
}

double simulate_functional(const DiffusionSpec& spec, const Observable& f, const SimConfig& cfg,
                           std::uint64_t path_index) {
    const double t = cfg.t_horizon;
    return simulate_functional(spec, f, cfg, path_index, std::span<const double>(&t, 1)).front();
}

std::vector<std::vector<double>> simulate_ensemble(const DiffusionSpec& spec, const Observable& f,
                                                   const SimConfig& cfg, std::span<const double> checkpoints) {
    validate(cfg, spec);
    std::vector<std::vector<double>> out(cfg.n_paths);
    for_each_path(cfg.n_paths, cfg.threads,
                  [&](std::uint64_t i) { out[i] = simulate_functional(spec, f, cfg, i, checkpoints); });
    return out;
}

TailEstimate make_tail_estimate(std::uint64_t k, std::uint64_t n, double eps, double pi_f, double delta) {
    TailEstimate est;
    est.n = n;
    est.k = k;
    est.p_hat = static_cast<double>(k) / static_cast<double>(n);
    est.ci_upper = clopper_pearson_upper(k, n, delta);
    est.eps = eps;
    est.pi_f = pi_f;
    est.delta = delta;
    return est;
}

TailEstimate estimate_tail(const DiffusionSpec& spec, const Observable& f, const SimConfig& cfg, double eps,
                           double pi_f, double delta) {
    if (!(eps > 0.0)) throw DomainError("eps must be positive");
    validate(cfg, spec);
    std::vector<signed char> hit(cfg.n_paths, -1);
    try {
        for_each_path(cfg.n_paths, cfg.threads, [&](std::uint64_t i) {
            hit[i] = simulate_functional(spec, f, cfg, i) - pi_f >= eps ? 1 : 0;
        });
    } catch (const NumericalError& e) {
        std::uint64_t done = 0;
        std::uint64_t k = 0;
        for (signed char h : hit) {
            if (h >= 0) ++done;
            if (h == 1) ++k;
        }
        std::ostringstream msg;
        msg << e.what() << " (tail estimate aborted after " << done << " of " << cfg.n_paths
            << " paths, " << k << " deviation events so far)";
        throw NumericalError(msg.str());
    }
    std::uint64_t k = 0;
    for (signed char h : hit) k += h == 1 ? 1 : 0;
    return make_tail_estimate(k, cfg.n_paths, eps, pi_f, delta);
}

namespace {

// First grid time at which the path started at x crosses y.
template <class Coeffs>
double hitting_time_one(const Coeffs& coeffs, const BoundaryMap& boundary, PathStream& rng, double x, double y,
                        double dt, std::uint64_t max_steps, bool& capped) {
    capped = false;
    if (x == y) return 0.0;
    const double sqrt_dt = std::sqrt(dt);
    double side = x - y;
    for (std::uint64_t k = 1; k <= max_steps; ++k) {
        x = boundary.apply(em_step(coeffs, x, dt, sqrt_dt, rng.normal()));
        const double now = x - y;
        if (now == 0.0 || (now > 0.0) != (side > 0.0)) return static_cast<double>(k) * dt;
        side = now;
    }
    capped = true;
    return static_cast<double>(max_steps) * dt;
}

HittingTimeEstimate summarize_hits(const std::vector<double>& times, const std::vector<char>& capped) {
    HittingTimeEstimate est;
    est.n = times.size();
    double sum = 0.0;
    for (double t : times) sum += t;
    est.mean = sum / static_cast<double>(est.n);
    double ss = 0.0;
    for (double t : times) ss += (t - est.mean) * (t - est.mean);
    est.std_error = est.n > 1 ? std::sqrt(ss / static_cast<double>(est.n - 1) / static_cast<double>(est.n)) : 0.0;
    std::uint64_t c = 0;
    for (char v : capped) c += v ? 1 : 0;
    est.capped_fraction = static_cast<double>(c) / static_cast<double>(est.n);
    est.reliable = est.capped_fraction <= 0.05;
    return est;
}

} // namespace

HittingTimeEstimate mc_hitting_time(const DiffusionSpec& spec, const SimConfig& cfg, double x, double y) {
    validate(cfg, spec);
    if (!spec.interval().contains(x) || !spec.interval().contains(y)) {
        throw DomainError("hitting-time endpoints must be interior");
    }
    const std::uint64_t max_steps = step_count(cfg.t_horizon, cfg.dt);
    const BoundaryMap boundary(spec.interval(), cfg.boundary);
    std::vector<double> times(cfg.n_paths);
    std::vector<char> capped(cfg.n_paths);
    with_coeffs(spec, [&](const auto& coeffs) {
        for_each_path(cfg.n_paths, cfg.threads, [&](std::uint64_t i) {
            PathStream rng(cfg.seed, i);
            bool c = false;
            times[i] = hitting_time_one(coeffs, boundary, rng, x, y, cfg.dt, max_steps, c);
            capped[i] = c;
        });
        return 0;
    });
    return summarize_hits(times, capped);
}

HittingTimeEstimate mc_average_hitting_time(const DiffusionSpec& spec, const SimConfig& cfg) {
    validate(cfg, spec);
    const StationarySampler sampler(spec);
    const std::uint64_t max_steps = step_count(cfg.t_horizon, cfg.dt);
    const BoundaryMap boundary(spec.interval(), cfg.boundary);
    std::vector<double> times(cfg.n_paths);
    std::vector<char> capped(cfg.n_paths);
    with_coeffs(spec, [&](const auto& coeffs) {
        for_each_path(cfg.n_paths, cfg.threads, [&](std::uint64_t i) {
            PathStream rng(cfg.seed, i);
            const double x = sampler(rng.uniform());
            const double y = sampler(rng.uniform());
            bool c = false;
            times[i] = hitting_time_one(coeffs, boundary, rng, x, y, cfg.dt, max_steps, c);
            capped[i] = c;
        });
        return 0;
    });
    return summarize_hits(times, capped);
}

std::vector<double> stationary_histogram(const DiffusionSpec& spec, const SimConfig& cfg, std::size_t bins) {
    validate(cfg, spec);
    const StateInterval& iv = spec.interval();
    if (!iv.bounded()) throw DomainError("stationary histogram needs a bounded interval");
    if (bins == 0) throw DomainError("bins must be positive");
    if (cfg.t_horizon < 100.0) throw DomainError("stationary histogram needs t_horizon >= 100");

    const std::uint64_t n = step_count(cfg.t_horizon, cfg.dt);
    const std::uint64_t burn = n / 10;
    const BoundaryMap boundary(iv, cfg.boundary);
    const double scale = static_cast<double>(bins) / iv.width();

    std::vector<std::vector<std::uint64_t>> per_path(cfg.n_paths);
    with_coeffs(spec, [&](const auto& coeffs) {
        for_each_path(cfg.n_paths, cfg.threads, [&](std::uint64_t i) {
            std::vector<std::uint64_t> counts(bins, 0);
            PathStream rng(cfg.seed, i);
            const double sqrt_dt = std::sqrt(cfg.dt);
            double x = start_point(cfg, spec);
            for (std::uint64_t k = 1; k <= n; ++k) {
                x = boundary.apply(em_step(coeffs, x, cfg.dt, sqrt_dt, rng.normal()));
                if (k > burn) {
                    const double pos = (x - iv.lower) * scale;
                    const std::size_t b = pos <= 0.0 ? 0 : std::min(bins - 1, static_cast<std::size_t>(pos));
                    ++counts[b];
                }
            }
            per_path[i] = std::move(counts);
        });
        return 0;
    });

    std::vector<std::uint64_t> totals(bins, 0);
    for (const auto& counts : per_path) {
        for (std::size_t b = 0; b < bins; ++b) totals[b] += counts[b];
    }
    std::uint64_t all = 0;
    for (auto c : totals) all += c;
    std::vector<double> freq(bins);
    for (std::size_t b = 0; b < bins; ++b) freq[b] = static_cast<double>(totals[b]) / static_cast<double>(all);
    return freq;
}

StationarySampler::StationarySampler(const DiffusionSpec& spec, std::size_t cells) {
    const StateInterval& iv = spec.interval();
    if (!iv.bounded()) throw DomainError("stationary sampler needs a bounded interval");
    const StationaryLaw law(spec);
    const PoissonGrid grid = make_grid(iv, std::max(cells, kMinGridSize));
    auto density = [&](double x) { return law.density(x); };

    knots_.reserve(grid.nodes.size() + 2);
    knots_.push_back(iv.lower);
    knots_.insert(knots_.end(), grid.nodes.begin(), grid.nodes.end());
    knots_.push_back(iv.upper);

    cdf_.assign(knots_.size(), 0.0);
    quad::ExhaustionOptions opts;
    for (std::size_t i = 0; i + 1 < knots_.size(); ++i) {
        double mass = 0.0;
        if (i == 0) {
            mass = quad::integrate_improper_value(density, knots_[0], knots_[1], opts, quad::Ends::lower);
        } else if (i + 2 == knots_.size()) {
            mass = quad::integrate_improper_value(density, knots_[i], knots_[i + 1], opts, quad::Ends::upper);
        } else {
            mass = quad::integrate(density, knots_[i], knots_[i + 1], quad::Tolerance{1e-15, 1e-12});
        }
        cdf_[i + 1] = cdf_[i] + mass;
    }
    const double total = cdf_.back();
    for (double& c : cdf_) c /= total;
}

double StationarySampler::operator()(double u) const {
    const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    if (it == cdf_.begin()) return knots_.front();
    if (it == cdf_.end()) return knots_.back();
    const std::size_t j = static_cast<std::size_t>(it - cdf_.begin()) - 1;
    const double span = cdf_[j + 1] - cdf_[j];
    const double frac = span > 0.0 ? (u - cdf_[j]) / span : 0.5;
    double x = knots_[j] + frac * (knots_[j + 1] - knots_[j]);
    // Keep draws interior.
    if (x <= knots_.front()) x = std::nextafter(knots_.front(), knots_.back());
    if (x >= knots_.back()) x = std::nextafter(knots_.back(), knots_.front());
    return x;
}

} // namespace ergobound
