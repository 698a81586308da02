#pragma once

#include "ergobound/models.hpp"

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

namespace ergobound {

/// Values sampled on strictly increasing points inside the state interval.
struct GridFunction {
    std::vector<double> grid;
    std::vector<double> values;
    std::string spec_id;

    std::size_t size() const { return grid.size(); }
};

/// Interior grid with endpoint clustering, plus the quadrature weights of
/// the midpoint rule in the clustering coordinate (sum of w_i g(x_i)
/// approximates the integral of g over the interval).
struct PoissonGrid {
    std::vector<double> nodes;
    std::vector<double> weights;
};

constexpr std::size_t kMinGridSize = 16;
constexpr std::size_t kDefaultGridSize = 4096;

/// Blend of uniform and Chebyshev spacing for bounded intervals, tan map
/// for a half-infinite one.
PoissonGrid make_grid(const StateInterval& interval, std::size_t n);

/// f_hat = Q# f on the grid: the solution of -A f_hat = f - pi(f) with
/// pi(f_hat) = 0, built from the scale/speed representation
///   f_hat(x) = -int_{x0}^x s(y) G(y) dy + C,   G(y) = int_l^y (f - pi(f)) m.
GridFunction solve_poisson(const DiffusionSpec& spec, const Observable& f,
                           std::size_t n = kDefaultGridSize);

struct GeneratorResult {
    GridFunction values;
    std::vector<std::string> warnings;
};

/// A applied to grid samples with second-order finite differences
/// (three-point central inside, four-point one-sided at the ends).
/// Independent of solve_poisson; used as a residual check.
GeneratorResult apply_generator(const DiffusionSpec& spec, const GridFunction& gf);

/// max_i |v_i|.
double sup_norm(const GridFunction& gf);

/// Writes "x,value" rows with a header line.
void write_csv(std::ostream& os, const GridFunction& gf);

} // namespace ergobound
