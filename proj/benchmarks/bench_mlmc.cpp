#include <benchmark/benchmark.h>

#include "mlmc/constants.hpp"
#include "mlmc/rng.hpp"
#include "mlmc/simulate.hpp"
#include "mlmc/validate.hpp"

namespace {

mlmc::ProblemSpec ou(double x0) {
    mlmc::Mat A(1, 1);
    A(0, 0) = -1.0;
    return mlmc::ProblemSpec({x0}, 1.0, mlmc::DriftModel::affine(A, {0.0}));
}

void BM_NormalDraw(benchmark::State& state) {
    mlmc::RngStream rng(1, 0, 0);
    double acc = 0.0;
    for (auto _ : state) acc += rng.next_normal();
    benchmark::DoNotOptimize(acc);
}
BENCHMARK(BM_NormalDraw);

void BM_CoupledPath(benchmark::State& state) {
    const auto p = ou(1.0);
    const std::int64_t n = state.range(0);
    std::uint64_t k = 0;
    for (auto _ : state) {
        mlmc::RngStream rng(1, 0, k++);
        benchmark::DoNotOptimize(mlmc::simulate_coupled_terminal(p, 2, n, rng));
    }
    state.SetItemsProcessed(state.iterations() * n * 3);  // fine + coarse grid values
}
BENCHMARK(BM_CoupledPath)->Arg(16)->Arg(64)->Arg(256);

void BM_MlmcEstimate(benchmark::State& state) {
    const auto p = ou(1.0);
    const auto f = mlmc::Payoff::linear({1.0});
    mlmc::LevelPlan plan{2, 3, {2000, 800, 300, 110}};
    std::uint64_t seed = 1;
    for (auto _ : state)
        benchmark::DoNotOptimize(mlmc::mlmc_estimate(p, f, plan, seed++));
}
BENCHMARK(BM_MlmcEstimate);

void BM_ConstantsBundle(benchmark::State& state) {
    const auto p = ou(1.0);
    for (auto _ : state) {
        mlmc::ConstantsBundle k(p, mlmc::LevelFactor::finite(2));
        benchmark::DoNotOptimize(k.rho17());
    }
}
BENCHMARK(BM_ConstantsBundle);

void BM_EstimatorMgfConstants(benchmark::State& state) {
    const auto p = ou(1.0);
    const auto f = mlmc::Payoff::linear({1.0});
    for (auto _ : state) {
        mlmc::ConstantsBundle k(p, f, mlmc::LevelFactor::finite(2));
        benchmark::DoNotOptimize(k.C50());
    }
}
BENCHMARK(BM_EstimatorMgfConstants);

void BM_OrliczNorm(benchmark::State& state) {
    mlmc::RngStream rng(3, 0, 0);
    std::vector<double> xs(static_cast<size_t>(state.range(0)));
    for (auto& v : xs) v = rng.next_normal();
    for (auto _ : state) benchmark::DoNotOptimize(mlmc::orlicz_norm(xs));
}
BENCHMARK(BM_OrliczNorm)->Arg(10000)->Arg(100000);

}  // namespace

BENCHMARK_MAIN();
