#include "ergobound/bounds.hpp"
#include "ergobound/ergodicity.hpp"
#include "ergobound/mc.hpp"
#include "ergobound/poisson.hpp"
#include "ergobound/quadrature.hpp"
#include "ergobound/rng.hpp"

#include <benchmark/benchmark.h>

#include <cmath>
#include <limits>

using namespace ergobound;

static void BM_HoeffdingBound(benchmark::State& state) {
    double t = 100.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(hoeffding_bound({t, 0.5, 1.0, 4.0}));
        t += 1e-9;
    }
}
BENCHMARK(BM_HoeffdingBound);

static void BM_EigentimeJacobi(benchmark::State& state) {
    const auto seq = EigenSequence::jacobi(2.0, 2.0);
    for (auto _ : state) benchmark::DoNotOptimize(eigentime(seq).value);
}
BENCHMARK(BM_EigentimeJacobi)->Unit(benchmark::kMillisecond);

static void BM_ImproperMaoTail(benchmark::State& state) {
    for (auto _ : state) {
        benchmark::DoNotOptimize(quad::integrate_improper([](double x) { return std::pow(1.0 + x, -3.0); }, 0.0,
                                                          std::numeric_limits<double>::infinity(), {},
                                                          quad::Ends::both));
    }
}
BENCHMARK(BM_ImproperMaoTail)->Unit(benchmark::kMicrosecond);

static void BM_IntegralCondition(benchmark::State& state) {
    const auto spec = DiffusionSpec::mao_class(3.0);
    for (auto _ : state) benchmark::DoNotOptimize(integral_condition(spec));
}
BENCHMARK(BM_IntegralCondition)->Unit(benchmark::kMillisecond);

static void BM_SolvePoisson(benchmark::State& state) {
    const auto spec = DiffusionSpec::tan_ou(0.5);
    const auto f = Observable::sine();
    for (auto _ : state) benchmark::DoNotOptimize(solve_poisson(spec, f, static_cast<std::size_t>(state.range(0))));
}
BENCHMARK(BM_SolvePoisson)->Arg(256)->Arg(4096)->Unit(benchmark::kMillisecond);

static void BM_PhiloxNormal(benchmark::State& state) {
    PathStream s(1, 0);
    for (auto _ : state) benchmark::DoNotOptimize(s.normal());
}
BENCHMARK(BM_PhiloxNormal);

static void BM_EulerStepsJacobi(benchmark::State& state) {
    const auto spec = DiffusionSpec::jacobi(1, 2, 2);
    const auto f = Observable::indicator(0.0, 0.5);
    SimConfig cfg;
    cfg.t_horizon = 10.0;
    for (auto _ : state) benchmark::DoNotOptimize(simulate_functional(spec, f, cfg, 0));
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) * 10000);
}
BENCHMARK(BM_EulerStepsJacobi)->Unit(benchmark::kMillisecond);

static void BM_EulerStepsTanOU(benchmark::State& state) {
    const auto spec = DiffusionSpec::tan_ou(0.5);
    const auto f = Observable::exponential(1.0, spec.interval());
    SimConfig cfg;
    cfg.t_horizon = 10.0;
    for (auto _ : state) benchmark::DoNotOptimize(simulate_functional(spec, f, cfg, 0));
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) * 10000);
}
BENCHMARK(BM_EulerStepsTanOU)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
