#include "ergobound/ergodicity.hpp"
#include "ergobound/errors.hpp"
#include "ergobound/poisson.hpp"

#include "battery.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

using namespace ergobound;

namespace {

double interior_residual(const DiffusionSpec& spec, const GridFunction& fhat, const Observable& f, double pi_f) {
    const auto a = apply_generator(spec, fhat);
    double worst = 0.0;
    for (std::size_t i = 1; i + 1 < fhat.size(); ++i) {
        worst = std::max(worst, std::fabs(a.values.values[i] + f(fhat.grid[i]) - pi_f));
    }
    return worst;
}

double max_error(const GridFunction& g, const std::function<double(double)>& exact) {
    double e = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) e = std::max(e, std::fabs(g.values[i] - exact(g.grid[i])));
    return e;
}

} // namespace

TEST(Grid, InteriorAndClustered) {
    const auto g = make_grid({0.0, 1.0}, 64);
    ASSERT_EQ(g.nodes.size(), 64u);
    EXPECT_GT(g.nodes.front(), 0.0);
    EXPECT_LT(g.nodes.back(), 1.0);
    EXPECT_LT(g.nodes[1] - g.nodes[0], g.nodes[32] - g.nodes[31]);
    double w = 0.0;
    for (double v : g.weights) w += v;
    EXPECT_NEAR(w, 1.0, 1e-3);
    EXPECT_THROW(make_grid({0.0, 1.0}, 8), DomainError);
}

TEST(SolvePoisson, ConstantGivesZero) {
    const auto spec = DiffusionSpec::jacobi(1, 2, 2);
    EXPECT_LT(sup_norm(solve_poisson(spec, Observable::constant(3.0), 64)), 1e-12);
}

TEST(SolvePoisson, TanOUSineEigenfunction) {
    const auto spec = DiffusionSpec::tan_ou(0.5);
    const auto f = Observable::sine();
    const auto fhat = solve_poisson(spec, f, 4096);
    EXPECT_LT(max_error(fhat, [](double x) { return std::sin(x); }), 1e-6);
    EXPECT_LT(interior_residual(spec, fhat, f, 0.0), 1e-4 * (1 + f.sup_norm));
}

TEST(SolvePoisson, JacobiLinearEigenfunction) {
    for (const auto& [a, b, s2] : {std::tuple{1.0, 2.0, 2.0}, std::tuple{0.5, 2.0, 1.0}}) {
        const auto spec = DiffusionSpec::jacobi(a, b, s2);
        const auto f = Observable::identity(spec.interval());
        const auto fhat = solve_poisson(spec, f, 4096);
        EXPECT_LT(max_error(fhat, [a = a, b = b](double x) { return (x - a / b) / b; }), 1e-6);
        EXPECT_LT(interior_residual(spec, fhat, f, a / b), 1e-4 * (1 + f.sup_norm));
    }
}

TEST(SolvePoisson, SupNormOfJacobiSolution) {
    const auto spec = DiffusionSpec::jacobi(1, 2, 2);
    const auto fhat = solve_poisson(spec, Observable::identity(spec.interval()), 1024);
    EXPECT_NEAR(sup_norm(fhat), 0.25, 1e-3);
    EXPECT_GE(sup_norm(fhat), std::fabs(fhat.values.front()));
}

TEST(SolvePoisson, DiscreteCentering) {
    const auto spec = DiffusionSpec::tan_ou(0.5);
    const auto fhat = solve_poisson(spec, Observable::exponential(1.0, spec.interval()), 1024);
    const auto grid = make_grid(spec.interval(), 1024);
    const StationaryLaw law(spec);
    double s = 0.0;
    for (std::size_t i = 0; i < fhat.size(); ++i) s += fhat.values[i] * law.density(grid.nodes[i]) * grid.weights[i];
    EXPECT_LT(std::fabs(s), 1e-6);
}

TEST(SolvePoisson, ResidualShrinksWithRefinement) {
    const auto spec = DiffusionSpec::tan_ou(0.5);
    const Observable f = test_battery(spec.interval())[5];
    const double pi_f = pi_integral(spec, f);
    const double coarse = interior_residual(spec, solve_poisson(spec, f, 256), f, pi_f);
    const double fine = interior_residual(spec, solve_poisson(spec, f, 512), f, pi_f);
    EXPECT_GT(coarse / fine, 3.0) << coarse << " -> " << fine;
}

TEST(SolvePoisson, MaoClassHalfLine) {
    const auto spec = DiffusionSpec::mao_class(3.0);
    const Observable f = Observable::indicator(0.0, 1.0);
    const double pi_f = pi_integral(spec, f);
    EXPECT_NEAR(pi_f, 0.75, 1e-10);
    const auto fhat = solve_poisson(spec, f, 512);
    for (double v : fhat.values) EXPECT_TRUE(std::isfinite(v));
}

TEST(ApplyGenerator, ConstantsAndPolynomials) {
    const auto spec = DiffusionSpec::jacobi(1, 2, 2);
    const auto g = make_grid(spec.interval(), 256);
    GridFunction c{g.nodes, std::vector<double>(g.nodes.size(), 4.0), spec.name()};
    for (double v : apply_generator(spec, c).values.values) EXPECT_NEAR(v, 0.0, 1e-9);
    GridFunction x{g.nodes, g.nodes, spec.name()};
    const auto ax = apply_generator(spec, x);
    for (std::size_t i = 0; i < g.nodes.size(); ++i) EXPECT_NEAR(ax.values.values[i], 1.0 - 2.0 * g.nodes[i], 1e-9);
}

TEST(ApplyGenerator, SineUnderTanOU) {
    const auto spec = DiffusionSpec::tan_ou(0.5);
    double prev = 1.0;
    for (std::size_t n : {128u, 256u, 512u}) {
        const auto g = make_grid(spec.interval(), n);
        GridFunction s{g.nodes, {}, spec.name()};
        for (double v : g.nodes) s.values.push_back(std::sin(v));
        const auto a = apply_generator(spec, s);
        double worst = 0.0;
        for (std::size_t i = 1; i + 1 < n; ++i) worst = std::max(worst, std::fabs(a.values.values[i] + std::sin(g.nodes[i])));
        EXPECT_LT(worst, prev);
        prev = worst;
    }
    EXPECT_LT(prev, 1e-3);
}

TEST(ApplyGenerator, RejectsBadGrids) {
    const auto spec = DiffusionSpec::jacobi(1, 2, 2);
    EXPECT_THROW(apply_generator(spec, GridFunction{{0.1, 0.2}, {1, 2}, ""}), DomainError);
    auto g = make_grid(spec.interval(), 32).nodes;
    g[3] = g[2];
    EXPECT_THROW(apply_generator(spec, GridFunction{g, std::vector<double>(32, 0.0), ""}), DomainError);
}

TEST(WriteCsv, HeaderAndRows) {
    std::ostringstream os;
    write_csv(os, GridFunction{{0.25, 0.5}, {1.0, -2.0}, ""});
    EXPECT_EQ(os.str(), "x,value\n0.25,1\n0.5,-2\n");
}

TEST(NormBound, BatteryOnBothBuiltins) {
    for (const auto& spec : {DiffusionSpec::jacobi(1, 2, 2), DiffusionSpec::tan_ou(0.5)}) {
        const double tav = eigentime(*eigen_sequence_for(spec)).value;
        for (const auto& f : test_battery(spec.interval())) {
            const double s = sup_norm(solve_poisson(spec, f, 256));
            EXPECT_LE(s, 2.0 * tav * f.sup_norm + 1e-6) << spec.name() << " " << f.label;
        }
    }
}
