#include <benchmark/benchmark.h>

#include "srl/catalog.hpp"
#include "srl/chart.hpp"
#include "srl/grading.hpp"
#include "srl/nilpotent.hpp"
#include "srl/poly_text.hpp"

using namespace srl;

static void BM_LieBracket(benchmark::State& state) {
    const auto d = static_cast<std::size_t>(state.range(0));
    std::vector<Polynomial> a;
    std::vector<Polynomial> b;
    for (std::size_t k = 0; k < d; ++k) {
        a.push_back(parse_polynomial("x1^2*x2 - 3*x1 + 1/2", d) * Polynomial::variable(d, k));
        b.push_back(parse_polynomial("x2^3 + x1*x2 - 7/3", d) + Polynomial::variable(d, d - 1 - k));
    }
    const PolyVectorField x(a);
    const PolyVectorField y(b);
    for (auto _ : state) benchmark::DoNotOptimize(lie_bracket(x, y));
}
BENCHMARK(BM_LieBracket)->Arg(2)->Arg(4)->Arg(6);

static void BM_Compose(benchmark::State& state) {
    const Polynomial p = parse_polynomial("(x1 + x2 + x3)^" + std::to_string(state.range(0)), 3);
    const std::vector<Polynomial> subs{parse_polynomial("x1 + x2^2", 3), parse_polynomial("x2", 3),
                                       parse_polynomial("x3 - x1*x2", 3)};
    for (auto _ : state) benchmark::DoNotOptimize(p.compose(subs, 64));
}
BENCHMARK(BM_Compose)->Arg(2)->Arg(4)->Arg(6);

static void BM_GradeAndChart(benchmark::State& state) {
    const auto g = catalog::heisenberg();
    const RationalVector o(3, Rational(1, 3));
    for (auto _ : state) {
        const GradingResult r = build_graded_structure(g, o);
        benchmark::DoNotOptimize(construct_adapted(g, r));
    }
}
BENCHMARK(BM_GradeAndChart);

static void BM_Nilpotentize(benchmark::State& state) {
    const auto g = catalog::grushin_like();
    const RationalVector o(2, Rational(0));
    const GradingResult r = build_graded_structure(g, o);
    const AdaptedChart c = construct_adapted(g, r);
    for (auto _ : state) benchmark::DoNotOptimize(nilpotentize(g, c));
}
BENCHMARK(BM_Nilpotentize);

BENCHMARK_MAIN();
