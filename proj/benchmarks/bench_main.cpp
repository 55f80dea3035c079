#include <benchmark/benchmark.h>

#include "ccp/evt.hpp"
#include "ccp/geometry.hpp"
#include "ccp/inference.hpp"
#include "ccp/rng.hpp"
#include "ccp/simulate.hpp"

using namespace ccp;

namespace {

void BM_StdfNumericPair(benchmark::State& state) {
    const Kernel k = Kernel::power_compact(0.25, 1.0);
    const double delta = 0.05 * double(state.range(0));
    for (auto _ : state)
        benchmark::DoNotOptimize(stdf_numeric({k, {{0, 0}, {delta, 0}}, {1.0, 1.0}}));
}
BENCHMARK(BM_StdfNumericPair)->Arg(1)->Arg(4)->Arg(8);

void BM_StdfNumericTriple(benchmark::State& state) {
    const Kernel k = Kernel::exponential(0.1);
    for (auto _ : state)
        benchmark::DoNotOptimize(
            stdf_numeric({k, {{0, 0}, {0.2, 0}, {0.1, 0.15}}, {1.0, 0.5, 2.0}}));
}
BENCHMARK(BM_StdfNumericTriple);

void BM_CjkRadial(benchmark::State& state) {
    for (auto _ : state)
        benchmark::DoNotOptimize(cjk_power_compact(1.0, 0.25, 0.2));
}
BENCHMARK(BM_CjkRadial);

void BM_PickandsCurve(benchmark::State& state) {
    const Kernel k = Kernel::power_compact(0.25, 1.0);
    StdfOptions opts;
    opts.abs_tol = 1e-5;
    opts.rel_tol = 1e-4;
    for (auto _ : state) {
        PickandsCurve curve(k, 0.2, 33, opts);
        benchmark::DoNotOptimize(curve.pickands(0.37));
    }
}
BENCHMARK(BM_PickandsCurve);

void BM_SimulateCauchy(benchmark::State& state) {
    const Kernel k = Kernel::power_compact(0.25, 1.0);
    const SiteSet sites = lattice_sites(3);
    const SimGrid grid = SimGrid::default_for(sites, k, int(state.range(0)));
    std::uint64_t seed = 1;
    for (auto _ : state)
        benchmark::DoNotOptimize(simulate_cauchy(k, sites, grid, 100, seed++));
}
BENCHMARK(BM_SimulateCauchy)->Arg(100)->Arg(200);

void BM_SimulateEv(benchmark::State& state) {
    const Kernel k = Kernel::power_compact(0.25, 1.0);
    const SiteSet sites = lattice_sites(3);
    std::uint64_t seed = 1;
    for (auto _ : state)
        benchmark::DoNotOptimize(simulate_ev(k, sites, 100, seed++));
}
BENCHMARK(BM_SimulateEv);

void BM_CauchyScaleMle(benchmark::State& state) {
    Rng rng(7);
    std::vector<double> y(size_t(state.range(0)));
    for (auto& v : y) v = 0.8 * rng.cauchy();
    for (auto _ : state) benchmark::DoNotOptimize(cauchy_scale_mle(y));
}
BENCHMARK(BM_CauchyScaleMle)->Arg(500)->Arg(10000);

void BM_FitKernelByScales(benchmark::State& state) {
    const Kernel k = Kernel::power_compact(0.25, 1.0);
    const SiteSet sites = lattice_sites(3);
    const SimGrid grid = SimGrid::default_for(sites, k, 200);
    auto z = simulate_cauchy(k, sites, grid, 500, 11);
    auto u = to_uniform(z);
    OptimizerConfig cfg;
    cfg.seed = 3;
    for (auto _ : state)
        benchmark::DoNotOptimize(
            fit_kernel_by_scales(u, KernelFamily::PowerCompact, {}, cfg));
}
BENCHMARK(BM_FitKernelByScales);

}  // namespace

BENCHMARK_MAIN();
