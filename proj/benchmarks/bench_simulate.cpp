#include <benchmark/benchmark.h>

#include "srl/catalog.hpp"
#include "srl/chart.hpp"
#include "srl/rng.hpp"
#include "srl/simulate.hpp"

using namespace srl;

namespace {

SdeModel grushin_adapted() {
    const auto g = catalog::grushin_like();
    const RationalVector o(2, Rational(0));
    const GradingResult r = build_graded_structure(g, o);
    return make_adapted_model(g, PolyVectorField::zero(2),
                              std::get<AdaptedChart>(validate_adapted(catalog::grushin_like_chart(), g, r.structure)));
}

}  // namespace

static void BM_PhiloxNormal(benchmark::State& state) {
    Philox4x32 rng(1, 0);
    for (auto _ : state) benchmark::DoNotOptimize(rng.next_normal());
}
BENCHMARK(BM_PhiloxNormal);

static void BM_EulerPaths(benchmark::State& state) {
    const SdeModel m = grushin_adapted();
    SimConfig c;
    c.eps = 0.1;
    c.steps = 1024;
    c.paths = 256;
    c.workers = 1;
    for (auto _ : state) benchmark::DoNotOptimize(simulate_paths(m, c));
    state.SetItemsProcessed(state.iterations() * c.paths * c.steps);
}
BENCHMARK(BM_EulerPaths)->Unit(benchmark::kMillisecond);

static void BM_MalliavinPaths(benchmark::State& state) {
    const SdeModel m = grushin_adapted();
    SimConfig c;
    c.eps = 0.1;
    c.steps = 1024;
    c.paths = 256;
    c.workers = 1;
    for (auto _ : state) benchmark::DoNotOptimize(malliavin_covariance(m, c));
    state.SetItemsProcessed(state.iterations() * c.paths * c.steps);
}
BENCHMARK(BM_MalliavinPaths)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
