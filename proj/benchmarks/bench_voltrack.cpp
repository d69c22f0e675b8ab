#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "voltrack/filters.hpp"
#include "voltrack/gains.hpp"
#include "voltrack/simulate.hpp"
#include "voltrack/tuning.hpp"

using namespace voltrack;

namespace {

std::vector<double> squared_noise(std::size_t n) {
    std::mt19937_64 rng(42);
    std::normal_distribution<double> z(0.0, 1.0);
    std::vector<double> xs(n);
    for (double& x : xs) {
        const double r = z(rng);
        x = 0.09 * r * r;
    }
    return xs;
}

}  // namespace

static void PureFilterRun(benchmark::State& state) {
    const auto xs = squared_noise(static_cast<std::size_t>(state.range(0)));
    const auto config = ExtendedParams::pure(static_cast<int>(state.range(1)), 2.0);
    for (auto _ : state) benchmark::DoNotOptimize(run(xs, config).s_n);
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(PureFilterRun)->ArgsProduct({{1000, 100000}, {0, 1, 4}});

static void Filter2Run(benchmark::State& state) {
    const auto xs = squared_noise(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(run(xs, Filter2Params{3.0, 2.0, 1.0, 0.09}).s_n);
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(Filter2Run)->Arg(1000)->Arg(100000);

static void Garch22Run(benchmark::State& state) {
    const auto xs = squared_noise(static_cast<std::size_t>(state.range(0)));
    const GarchParams p{2, 2, 0.002, {0.5, 0.3}, {0.1, 0.05}};
    for (auto _ : state) benchmark::DoNotOptimize(run(xs, p).s_n);
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(Garch22Run)->Arg(1000)->Arg(100000);

static void CertifyStability(benchmark::State& state) {
    const int k = static_cast<int>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(stability_report(k, 10.0).all_distinct);
}
BENCHMARK(CertifyStability)->DenseRange(0, 8, 4);

static void RiccatiResidual(benchmark::State& state) {
    const int k = static_cast<int>(state.range(0));
    const auto& u = solve_care(k).u_matrix;
    for (auto _ : state) benchmark::DoNotOptimize(riccati_residual_norm(k, u));
}
BENCHMARK(RiccatiResidual)->DenseRange(0, 8, 4);

static void TuneFilterZero(benchmark::State& state) {
    const auto xs = squared_noise(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(tune_filter0(xs, 0).best_sn);
}
BENCHMARK(TuneFilterZero)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

static void TuneFilterOne(benchmark::State& state) {
    const auto xs = squared_noise(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(tune_filter1(xs).best_sn);
}
BENCHMARK(TuneFilterOne)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

static void FitGarch11(benchmark::State& state) {
    const auto xs = squared_noise(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(fit_garch(xs, 1, 1).best_sn);
}
BENCHMARK(FitGarch11)->Arg(1000)->Unit(benchmark::kMillisecond);

static void SimulatePath(benchmark::State& state) {
    Scenario sc;
    sc.v = FunctionSpec::sinusoid(0.1, 0.05, 1.0);
    const auto n = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(generate_path(sc, n, 7).xs.back());
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(SimulatePath)->Arg(10000)->Arg(1000000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
