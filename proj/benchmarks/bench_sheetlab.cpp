#include <benchmark/benchmark.h>

#include "sheetlab/ito.hpp"
#include "sheetlab/local_time.hpp"
#include "sheetlab/lt_integrals.hpp"
#include "sheetlab/sheet.hpp"

using namespace sheetlab;

static void BM_SampleSheet(benchmark::State& state) {
    const std::uint32_t n = static_cast<std::uint32_t>(state.range(0));
    std::uint64_t seed = 1;
    for (auto _ : state) {
        benchmark::DoNotOptimize(SheetPath::sample(GridSpec(n, n), 1, seed++));
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n) * n);
}
BENCHMARK(BM_SampleSheet)->Arg(128)->Arg(512)->Arg(1024);

static void BM_JField(benchmark::State& state) {
    const std::uint32_t n = static_cast<std::uint32_t>(state.range(0));
    const SheetPath path = SheetPath::sample(GridSpec(n, n), 1, 7);
    for (auto _ : state) {
        benchmark::DoNotOptimize(JField(path, 0));
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n) * n);
}
BENCHMARK(BM_JField)->Arg(128)->Arg(512);

static void BM_PlaneLocalTime(benchmark::State& state) {
    const std::uint32_t n = static_cast<std::uint32_t>(state.range(0));
    const SheetPath path = SheetPath::sample(GridSpec(n, n), 1, 7);
    const XGrid xg(-2.5, 2.5, 100, 0.05);
    std::vector<std::uint32_t> eval{n / 4, n / 2, 3 * n / 4, n};
    for (auto _ : state) {
        benchmark::DoNotOptimize(plane_local_time(path, 0, xg, eval, eval));
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n) * n);
}
BENCHMARK(BM_PlaneLocalTime)->Arg(256)->Arg(1024);

static void BM_LtSpaceIntegral(benchmark::State& state) {
    const std::uint32_t n = static_cast<std::uint32_t>(state.range(0));
    const SheetPath path = SheetPath::sample(GridSpec(n, n), 1, 7);
    const Integrand f(SmoothFunction{
        [](double s, double t, double x) { return std::sin(x) * s * t; },
        [](double s, double t, double x) { return std::cos(x) * s * t; }});
    for (auto _ : state) {
        benchmark::DoNotOptimize(lt_space_integral(f, path, 0, n, n, 16));
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n) * n);
}
BENCHMARK(BM_LtSpaceIntegral)->Arg(256)->Arg(1024);

BENCHMARK_MAIN();
