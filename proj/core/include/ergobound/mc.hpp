#pragma once

#include "ergobound/models.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace ergobound {

struct BoundaryPolicy {
    enum class Kind { reflect, clamp };
    Kind kind = Kind::reflect;
    /// Clamp margin: states are projected onto [l + delta, u - delta].
    double delta = 0.0;

    static BoundaryPolicy reflect() { return {Kind::reflect, 0.0}; }
    static BoundaryPolicy clamp(double delta) { return {Kind::clamp, delta}; }
};

struct SimConfig {
    double dt = 1e-3;
    double t_horizon = 1.0;
    std::uint64_t n_paths = 1;
    std::uint64_t seed = 0;
    /// Start point; the interval midpoint when empty.
    std::optional<double> x0;
    BoundaryPolicy boundary = BoundaryPolicy::reflect();
    /// Worker threads. Results do not depend on this value.
    unsigned threads = 1;
};

/// Throws DomainError if the configuration does not fit the model.
void validate(const SimConfig& cfg, const DiffusionSpec& spec);

/// Start point used by the simulator.
double start_point(const SimConfig& cfg, const DiffusionSpec& spec);

/// Euler-Maruyama states X_0, ..., X_N of one path up to t_horizon.
std::vector<double> sample_path(const DiffusionSpec& spec, const SimConfig& cfg, std::uint64_t path_index);

/// Trapezoidal (1/t) int_0^t f(X_s) ds along path `path_index` with
/// t = t_horizon.
double simulate_functional(const DiffusionSpec& spec, const Observable& f, const SimConfig& cfg,
                           std::uint64_t path_index);

/// Same path, time averages read off at each checkpoint (ascending, each a
/// positive multiple of dt up to t_horizon).
std::vector<double> simulate_functional(const DiffusionSpec& spec, const Observable& f, const SimConfig& cfg,
                                        std::uint64_t path_index, std::span<const double> checkpoints);

/// All paths: result[i][c] is path i's time average at checkpoint c.
std::vector<std::vector<double>> simulate_ensemble(const DiffusionSpec& spec, const Observable& f,
                                                   const SimConfig& cfg, std::span<const double> checkpoints);

struct TailEstimate {
    std::uint64_t n = 0;
    std::uint64_t k = 0;
    double p_hat = 0.0;
    double ci_upper = 1.0;
    double eps = 0.0;
    double pi_f = 0.0;
    double delta = 0.01;
};

constexpr double kDefaultConfidenceDelta = 0.01;

TailEstimate make_tail_estimate(std::uint64_t k, std::uint64_t n, double eps, double pi_f,
                                double delta = kDefaultConfidenceDelta);

/// Frequency of {time average - pi_f >= eps} over n_paths paths at
/// t_horizon, with its exact binomial upper limit.
TailEstimate estimate_tail(const DiffusionSpec& spec, const Observable& f, const SimConfig& cfg, double eps,
                           double pi_f, double delta = kDefaultConfidenceDelta);

struct HittingTimeEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    std::uint64_t n = 0;
    double capped_fraction = 0.0;
    /// False when more than 5% of paths reached the horizon without hitting.
    bool reliable = true;
};

/// Mean first grid time at which X_k - y changes sign, started from x.
HittingTimeEstimate mc_hitting_time(const DiffusionSpec& spec, const SimConfig& cfg, double x, double y);

/// Hitting time averaged over independent (x, y) drawn from the stationary
/// law; estimates t_av. Bounded intervals only.
HittingTimeEstimate mc_average_hitting_time(const DiffusionSpec& spec, const SimConfig& cfg);

/// Occupation fractions over equal-width bins after discarding the first
/// 10% of each path. Needs a bounded interval and t_horizon >= 100.
std::vector<double> stationary_histogram(const DiffusionSpec& spec, const SimConfig& cfg, std::size_t bins);

/// Inverse-CDF sampler for the stationary law on a bounded interval.
class StationarySampler {
public:
    explicit StationarySampler(const DiffusionSpec& spec, std::size_t cells = 2048);
    double operator()(double u) const;

private:
    std::vector<double> knots_;
    std::vector<double> cdf_;
};

} // namespace ergobound
