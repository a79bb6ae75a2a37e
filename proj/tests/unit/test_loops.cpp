#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "srl/catalog.hpp"
#include "srl/errors.hpp"
#include "srl/loops.hpp"
#include "srl/nilpotent.hpp"
#include "srl/poly_text.hpp"
#include "srl/rng.hpp"
#include "srl/simulate.hpp"
#include "srl/stats.hpp"

using namespace srl;

namespace {

SdeModel adapted_identity(const std::vector<PolyVectorField>& g) {
    const RationalVector o(g[0].dim(), Rational(0));
    const GradingResult r = build_graded_structure(g, o);
    return make_adapted_model(g, PolyVectorField::zero(g[0].dim()),
                              std::get<AdaptedChart>(validate_adapted(PolyMap::identity(g[0].dim()), g, r.structure)));
}

std::vector<double> grid64() {
    std::vector<double> t;
    for (int k = 0; k <= 64; ++k) t.push_back(k / 64.0);
    return t;
}

NilpotentSystem grushin_limit() {
    const auto g = catalog::grushin_like();
    const RationalVector o(2, Rational(0));
    const GradingResult r = build_graded_structure(g, o);
    return nilpotentize(g, std::get<AdaptedChart>(validate_adapted(catalog::grushin_like_chart(), g, r.structure)));
}

}  // namespace

TEST(Density, StandardNormalOracle) {
    Philox4x32 r(3, 0);
    std::vector<double> z(200000);
    for (auto& x : z) x = r.next_normal();
    const DensityEstimate d = density_at_zero(z, 1, 0.1);
    ASSERT_TRUE(d.usable);
    EXPECT_NEAR(d.value, 1.0 / std::sqrt(2.0 * M_PI), 3.0 * d.std_error + 0.002);
}

TEST(Density, UniformAndEdgeCases) {
    Philox4x32 r(4, 0);
    std::vector<double> u(100000);
    for (auto& x : u) x = 2.0 * r.next_uniform() - 1.0;
    const DensityEstimate d = density_at_zero(u, 1, 0.2);
    EXPECT_NEAR(d.value, 0.5, 4.0 * d.std_error);
    std::vector<double> far(2000, 5.0);
    const DensityEstimate none = density_at_zero(far, 1, 0.1);
    EXPECT_EQ(none.value, 0.0);
    EXPECT_FALSE(none.usable);
    EXPECT_THROW((void)density_at_zero(std::vector<double>(999, 0.0), 1, 0.1), EstimationError);
    EXPECT_NEAR(ball_volume(2, 1.0), M_PI, 1e-12);
    EXPECT_NEAR(ball_volume(3, 2.0), 4.0 / 3.0 * M_PI * 8.0, 1e-12);
}

TEST(Loops, BrownianBridgeMidpointVariance) {
    const SdeModel bm = adapted_identity(catalog::elliptic(1));
    SimConfig c;
    c.eps = 1.0;
    c.steps = 64;
    c.paths = 100000;
    const auto times = grid64();
    const LoopEnsemble loops = sample_loops(bm, c, 0.05, times, 1000);
    for (double x : loops.terminal) EXPECT_LE(std::abs(x), 0.05);
    const auto mid = loops.marginal(loops.time_index(0.5), 0);
    const double n = static_cast<double>(mid.size());
    EXPECT_NEAR(variance(mid), 0.25, 3.0 * 0.25 * std::sqrt(2.0 / n));

    const std::vector<double> lags{1.0 / 64, 1.0 / 32, 1.0 / 16, 1.0 / 8};
    const LoopEnsemble* one[] = {&loops};
    const TightnessReport t = tightness_moment_check(one, lags);
    EXPECT_GE(t.min_exponent, 1.8);
    EXPECT_LE(t.min_exponent, 2.1);
    for (const auto& row : t.rows) {
        const double h = row.lag;
        EXPECT_NEAR(row.moment, 3.0 * std::pow(h * (1.0 - h), 2), 0.1 * 3.0 * std::pow(h * (1.0 - h), 2));
    }
}

TEST(Loops, HugeRadiusAcceptsEverything) {
    const SdeModel bm = adapted_identity(catalog::elliptic(2));
    SimConfig c;
    c.steps = 8;
    c.paths = 500;
    const double t[] = {0.5};
    const LoopEnsemble all = sample_loops(bm, c, 1e6, t);
    EXPECT_EQ(all.acceptance_rate, 1.0);
    EXPECT_EQ(all.size(), 500u);
    EXPECT_THROW((void)sample_loops(bm, c, 1e-7, t), EstimationError);
}

TEST(Loops, ConstantPathsHaveInfiniteExponent) {
    LoopEnsemble e;
    e.dim = 1;
    e.times = grid64();
    e.rescaled.assign(20 * e.times.size(), 0.25);
    e.chart_coords = e.rescaled;
    e.terminal.assign(20, 0.25);
    const std::vector<double> lags{1.0 / 64, 1.0 / 8};
    const LoopEnsemble* one[] = {&e};
    const TightnessReport t = tightness_moment_check(one, lags);
    EXPECT_TRUE(std::isinf(t.min_exponent));
    EXPECT_TRUE(t.passed());
    for (const auto& row : t.rows) EXPECT_EQ(row.moment, 0.0);
}

TEST(Loops, CompareNullAndNegativeControl) {
    const NilpotentSystem sys = grushin_limit();
    SimConfig c;
    c.steps = 256;
    c.paths = 30000;
    const double times[] = {0.25, 0.5, 0.75};
    const LoopEnsemble a = sample_loops(sys, c, 0.2, times, 1000);
    c.master_seed = 2;
    const LoopEnsemble b = sample_loops(sys, c, 0.2, times, 1000);
    const LoopComparison null = compare_loop_laws(a, b, times);
    EXPECT_GT(null.energy.p_value, 0.01);
    EXPECT_LT(null.max_ks(), 0.06);

    NilpotentSystem wrong = sys;
    wrong.fields[1] = parse_field("(0, -2*y1^2)", 2);
    wrong.drift_tilde = ito_drift_correction(PolyVectorField::zero(2), wrong.fields);
    c.master_seed = 3;
    const LoopEnsemble w = sample_loops(wrong, c, 0.2, times, 1000);
    const LoopComparison alt = compare_loop_laws(a, w, times);
    EXPECT_LT(alt.energy.p_value, 0.01);
}

TEST(HeatSlope, EllipticPlane) {
    const SdeModel m = adapted_identity(catalog::elliptic(2));
    SimConfig c;
    c.steps = 4;
    c.paths = 20000;
    const double grid[] = {0.2, 0.1, 0.05, 0.02};
    const HeatSlopeReport r = heat_kernel_slope(m, grid, c);
    EXPECT_EQ(r.homogeneous_dimension, 2);
    EXPECT_NEAR(r.fit.slope, 1.0, 0.15);
    EXPECT_GT(r.q_lower99, 0.0);
    const double narrow[] = {0.2, 0.1, 0.05};
    EXPECT_THROW((void)heat_kernel_slope(m, narrow, c), InvalidArgument);
}

TEST(Collapse, EllipticIsVacuous) {
    const SdeModel m = adapted_identity(catalog::elliptic(2));
    SimConfig c;
    c.steps = 4;
    c.paths = 2000;
    const double grid[] = {0.1, 0.01};
    const CollapseReport r = sqrt_eps_collapse(m, 2, grid, c);
    EXPECT_TRUE(r.vacuous);
    EXPECT_TRUE(r.passed());
}

TEST(BridgeOracle, UnitWeightsRecoverPlainBridge) {
    BridgeOracleOptions o;
    o.unit_weights = true;
    o.steps = 64;
    o.permutations = 50;
    o.bootstrap = 50;
    const BridgeOracleReport r = reweighted_bridge_oracle(20000, o);
    EXPECT_NEAR(r.ess, 20000.0, 1e-6);
    EXPECT_GT(r.weighted_vs_plain.p_value, 0.001);
    EXPECT_NEAR(r.variance, 0.25, 4.0 * 0.25 * std::sqrt(2.0 / 20000));
    EXPECT_NEAR(r.excess_kurtosis, 0.0, 0.15);
}

TEST(BridgeOracle, WeightingIsDetectable) {
    BridgeOracleOptions o;
    o.steps = 128;
    o.permutations = 100;
    o.bootstrap = 50;
    const BridgeOracleReport r = reweighted_bridge_oracle(20000, o);
    EXPECT_LT(r.ess, 20000.0);
    EXPECT_LT(r.variance, 0.25);
    EXPECT_GT(r.weighted_vs_plain.statistic, 0.02);
    EXPECT_THROW((void)reweighted_bridge_oracle(100, o), InvalidArgument);
}

TEST(Loops, LimitFirstCoordinateIsBrownian) {
    SimConfig c;
    c.steps = 64;
    c.paths = 20000;
    const PathEnsemble e = simulate_limit(grushin_limit(), c);
    std::vector<double> x1;
    for (std::size_t p = 0; p < e.size(); ++p) x1.push_back(e.terminal_of(p)[0]);
    EXPECT_NEAR(variance(x1), 1.0, 5.0 / std::sqrt(static_cast<double>(e.size())));
}

TEST(Loops, SmallEpsMidpointsMatchReweightedBridge) {
    const auto g = catalog::grushin_like();
    const RationalVector o(2, Rational(0));
    const GradingResult r = build_graded_structure(g, o);
    const SdeModel m = make_adapted_model(
        g, PolyVectorField::zero(2), std::get<AdaptedChart>(validate_adapted(catalog::grushin_like_chart(), g, r.structure)));
    SimConfig c;
    c.eps = 0.01;
    c.steps = 512;
    c.paths = 50000;
    const double half[] = {0.5};
    const LoopEnsemble loops = sample_loops(m, c, 0.1, half, 1000);
    BridgeOracleOptions opt;
    opt.steps = 256;
    opt.permutations = 20;
    opt.bootstrap = 20;
    opt.loop_midpoints = loops.marginal(0, 0);
    const BridgeOracleReport rep = reweighted_bridge_oracle(50000, opt);
    ASSERT_TRUE(rep.vs_loops.has_value());
    EXPECT_LE(rep.vs_loops->statistic, 0.1);
}
