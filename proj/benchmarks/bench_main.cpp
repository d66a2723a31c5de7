#include <benchmark/benchmark.h>

#include <cmath>
#include <memory>
#include <vector>

#include <fraclab/dirichlet.hpp>
#include <fraclab/halfspace.hpp>
#include <fraclab/heat.hpp>
#include <fraclab/levy.hpp>
#include <fraclab/operators.hpp>
#include <fraclab/symbols.hpp>

using namespace fraclab;

namespace {

SampledFunction gaussian(std::size_t n) {
    return SampledFunction::sample(UniformGrid1D::make(-8.0, 8.0, n), [](double x) { return std::exp(-x * x); });
}

void BM_Multiplier(benchmark::State& state) {
    const auto u = gaussian(static_cast<std::size_t>(state.range(0)));
    const SymbolSpec s = SymbolSpec::riesz(FractionalOrder(0.5));
    for (auto _ : state) benchmark::DoNotOptimize(apply_multiplier(s, u));
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Multiplier)->RangeMultiplier(4)->Range(1 << 10, 1 << 18)->Complexity(benchmark::oNLogN);

void BM_PrincipalValue(benchmark::State& state) {
    const auto u = gaussian(static_cast<std::size_t>(state.range(0)));
    const auto k = fractional_laplacian_kernel(FractionalOrder(0.5));
    const std::vector<double> x{-1.0, -0.5, 0.0, 0.5, 1.0};
    for (auto _ : state) benchmark::DoNotOptimize(apply_pv_integral(k, u, x));
}
BENCHMARK(BM_PrincipalValue)->Arg(257)->Arg(1025)->Unit(benchmark::kMillisecond);

void BM_Normalization(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(estimate_normalization(FractionalOrder(0.5)));
}
BENCHMARK(BM_Normalization)->Unit(benchmark::kMillisecond);

void BM_ReducerRoundTrip(benchmark::State& state) {
    // The box stays [-32, 32) while the spacing shrinks.
    const auto log2n = static_cast<std::size_t>(state.range(0));
    const auto grid = half_line_grid(log2n, std::ldexp(1.0, static_cast<int>(log2n) - 6));
    const auto u = sample_half_line(grid, [](double x) { return x * x * std::exp(-x * x); });
    for (auto _ : state) {
        const auto fwd = xi_apply(ReducerSign::Plus, 0.5, u.sample);
        benchmark::DoNotOptimize(xi_apply(ReducerSign::Plus, -0.5, fwd.value));
    }
}
BENCHMARK(BM_ReducerRoundTrip)->Arg(14)->Arg(16)->Arg(18)->Unit(benchmark::kMillisecond);

void BM_Assemble(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(assemble(FractionalOrder(0.5), n));
}
BENCHMARK(BM_Assemble)->Arg(20)->Arg(40)->Arg(60)->Unit(benchmark::kMillisecond);

void BM_EigenSolve(benchmark::State& state) {
    const auto sys = assemble(FractionalOrder(0.5), static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(eigen_solve(sys, 3));
}
BENCHMARK(BM_EigenSolve)->Arg(40)->Arg(80)->Unit(benchmark::kMillisecond);

void BM_HeatImplicitEuler(benchmark::State& state) {
    auto sys = std::make_shared<const DirichletSystem>(assemble(FractionalOrder(0.5), 40));
    const Eigen::VectorXd u0 = solve_stationary(*sys, [](double) { return 1.0; }).u.coefficients;
    HeatConfig c;
    c.system = sys;
    c.T = 1.0;
    c.dt = 1e-3;
    c.scheme = HeatScheme::ImplicitEuler;
    for (auto _ : state) benchmark::DoNotOptimize(evolve(c, u0));
}
BENCHMARK(BM_HeatImplicitEuler)->Unit(benchmark::kMillisecond);

void BM_FreeFeynmanKac(benchmark::State& state) {
    StableConfig c;
    c.a = FractionalOrder(0.5);
    c.n_paths = static_cast<std::size_t>(state.range(0));
    c.dt = 1e-3;
    for (auto _ : state) benchmark::DoNotOptimize(feynman_kac_free(c, [](double y) { return std::cos(y); }, 0.0, 1.0));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_FreeFeynmanKac)->Arg(10000)->Unit(benchmark::kMillisecond);

void BM_KilledFeynmanKac(benchmark::State& state) {
    StableConfig c;
    c.a = FractionalOrder(0.5);
    c.n_paths = static_cast<std::size_t>(state.range(0));
    c.dt = 1e-3;
    for (auto _ : state) benchmark::DoNotOptimize(feynman_kac_killed(c, [](double) { return 1.0; }, 0.0, 0.5, 2));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_KilledFeynmanKac)->Arg(10000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
