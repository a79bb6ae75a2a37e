#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <cmath>
#include <sstream>

#include "srl/catalog.hpp"
#include "srl/chart.hpp"
#include "srl/errors.hpp"
#include "srl/nilpotent.hpp"
#include "srl/poly_text.hpp"
#include "srl/sde_model.hpp"
#include "srl/simulate.hpp"
#include "srl/stats.hpp"

using namespace srl;

namespace {

std::string csv_of(const PathEnsemble& e) {
    std::ostringstream s;
    write_ensemble_csv(s, e);
    return s.str();
}

AdaptedChart identity_chart(const std::vector<PolyVectorField>& g) {
    const RationalVector o(g[0].dim(), Rational(0));
    const GradingResult r = build_graded_structure(g, o);
    return std::get<AdaptedChart>(validate_adapted(PolyMap::identity(g[0].dim()), g, r.structure));
}

Eigen::MatrixXd mat(std::span<const double> m, std::size_t d) {
    Eigen::MatrixXd out(d, d);
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) out(i, j) = m[i * d + j];
    return out;
}

}  // namespace

TEST(Simulate, ConfigValidation) {
    SimConfig c;
    c.paths = 0;
    EXPECT_THROW(c.validate(), InvalidArgument);
    c.paths = 1;
    c.eps = 0;
    EXPECT_THROW(c.validate(), InvalidArgument);
}

TEST(Simulate, DeterministicAcrossWorkerCounts) {
    const RationalVector o(2, Rational(0));
    const SdeModel m = make_polynomial_model(catalog::grushin_like(), PolyVectorField::zero(2), o);
    SimConfig c;
    c.eps = 0.1;
    c.steps = 64;
    c.paths = 1000;
    c.chunk_size = 64;
    RecordOptions r;
    r.times = {0.25, 0.5};
    r.jacobian = true;
    c.workers = 1;
    const std::string one = csv_of(run_ensemble(m, c, r));
    c.workers = 8;
    const std::string eight = csv_of(run_ensemble(m, c, r));
    EXPECT_EQ(one, eight);
    c.master_seed = 2;
    EXPECT_NE(one, csv_of(run_ensemble(m, c, r)));
}

TEST(Simulate, PathsDependOnlyOnTheirChunk) {
    const RationalVector o(2, Rational(0));
    const SdeModel m = make_polynomial_model(catalog::grushin_like(), PolyVectorField::zero(2), o);
    SimConfig c;
    c.steps = 16;
    c.chunk_size = 100;
    c.paths = 300;
    const PathEnsemble big = simulate_paths(m, c);
    c.paths = 100;
    const PathEnsemble small = simulate_paths(m, c);
    for (std::size_t i = 0; i < small.terminal.size(); ++i) EXPECT_EQ(small.terminal[i], big.terminal[i]);
}

TEST(Simulate, CsvLayout) {
    const RationalVector o(2, Rational(0));
    const SdeModel m = make_polynomial_model(catalog::grushin_like(), PolyVectorField::zero(2), o);
    SimConfig c;
    c.steps = 4;
    c.paths = 2;
    const std::string csv = csv_of(simulate_with_jacobian(m, c));
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "path_id,time,x1,x2,v11,v12,v21,v22");
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 3);
}

TEST(Simulate, EulerMeanOfLinearModelIsExact) {
    // dx = x o dB: Euler on the Ito form gives E x_N = (1 + eps / (2N))^N
    const std::vector<PolyVectorField> g{parse_field("(x1)", 1)};
    const RationalVector start{Rational(1)};
    const SdeModel m = make_polynomial_model(g, PolyVectorField::zero(1), start);
    for (std::size_t steps : {4u, 8u}) {
        SimConfig c;
        c.eps = 1.0;
        c.steps = steps;
        c.paths = 400000;
        const PathEnsemble e = simulate_paths(m, c);
        const double expected = std::pow(1.0 + 0.5 / steps, static_cast<double>(steps));
        const double se = std::sqrt(variance(e.terminal) / e.size());
        EXPECT_NEAR(mean(e.terminal), expected, 4.0 * se) << steps;
    }
}

TEST(Simulate, InverseFlowInvertsForwardFlow) {
    const std::vector<PolyVectorField> g{parse_field("(x2, 3/10*x1)", 2), parse_field("(1/5*x1, x1 - x2)", 2)};
    const RationalVector start{Rational(1), Rational(0)};
    const SdeModel m = make_polynomial_model(g, parse_field("(-x2, x1)", 2), start);
    SimConfig c;
    c.eps = 1.0;
    c.steps = 1024;
    c.paths = 500;
    const PathEnsemble e = simulate_with_jacobian(m, c, true);
    std::vector<double> err;
    for (std::size_t p = 0; p < e.size(); ++p) {
        const Eigen::MatrixXd vu = mat(e.matrix(e.v, p), 2) * mat(e.matrix(e.u, p), 2);
        err.push_back((vu - Eigen::MatrixXd::Identity(2, 2)).norm());
    }
    EXPECT_LE(quantile(err, 0.5), 5.0 / std::sqrt(1024.0));
}

TEST(Simulate, PulledBackFieldFollowsBracketIdentity) {
    // Heisenberg: v_t X1(x_t) = X1(x0) - sqrt(eps) B^2_t d3, since [X2, X1] = -d3 and d3 is central
    const auto h = catalog::heisenberg();
    const RationalVector o(3, Rational(0));
    const SdeModel m = make_polynomial_model(h, PolyVectorField::zero(3), o);
    SimConfig c;
    c.eps = 0.5;
    c.steps = 256;
    c.paths = 20000;
    const PathEnsemble e = simulate_with_jacobian(m, c);
    std::vector<double> comp[3];
    for (std::size_t p = 0; p < e.size(); ++p) {
        const auto x = e.terminal_of(p);
        const auto vx = h[0].evaluate(x);
        const auto v = e.matrix(e.v, p);
        for (std::size_t k = 0; k < 3; ++k) comp[k].push_back(v[k * 3] * vx[0] + v[k * 3 + 1] * vx[1] + v[k * 3 + 2] * vx[2]);
    }
    const double n = static_cast<double>(e.size());
    EXPECT_NEAR(mean(comp[0]), 1.0, 1e-9);
    EXPECT_NEAR(mean(comp[1]), 0.0, 1e-9);
    EXPECT_NEAR(mean(comp[2]), 0.0, 4.0 * std::sqrt(0.5 / n));
    EXPECT_NEAR(variance(comp[2]), 0.5, 4.0 * 0.5 * std::sqrt(2.0 / n));
}

TEST(Simulate, EllipticMalliavinIsIdentity) {
    const auto g = catalog::elliptic(3);
    const SdeModel m = make_adapted_model(g, PolyVectorField::zero(3), identity_chart(g));
    for (double eps : {1.0, 0.01}) {
        SimConfig c;
        c.eps = eps;
        c.steps = 64;
        c.paths = 50;
        const PathEnsemble e = malliavin_covariance(m, c);
        for (std::size_t p = 0; p < e.size(); ++p) {
            const auto cm = e.matrix(e.malliavin, p);
            for (std::size_t i = 0; i < 9; ++i) EXPECT_NEAR(cm[i], i % 4 == 0 ? 1.0 : 0.0, 1e-10);
            EXPECT_NEAR(e.lambda_min[p], 1.0, 1e-10);
        }
    }
}

TEST(Simulate, MalliavinMatrixIsSymmetricPositive) {
    const auto g = catalog::grushin_like();
    const RationalVector o(2, Rational(0));
    const GradingResult r = build_graded_structure(g, o);
    const auto chart = std::get<AdaptedChart>(validate_adapted(catalog::grushin_like_chart(), g, r.structure));
    const SdeModel m = make_adapted_model(g, PolyVectorField::zero(2), chart);
    SimConfig c;
    c.eps = 0.1;
    c.steps = 256;
    c.paths = 500;
    const PathEnsemble e = malliavin_covariance(m, c);
    for (std::size_t p = 0; p < e.size(); ++p) {
        const auto cm = e.matrix(e.malliavin, p);
        EXPECT_EQ(cm[1], cm[2]);
        EXPECT_GT(e.lambda_min[p], 0.0);
    }
    RecordOptions needs_weights;
    needs_weights.malliavin = true;
    const SdeModel raw = make_polynomial_model(g, PolyVectorField::zero(2), o);
    EXPECT_THROW((void)run_ensemble(raw, c, needs_weights), InvalidArgument);
}

TEST(Simulate, ExplodingPathsAreAnError) {
    const std::vector<PolyVectorField> g{parse_field("(x1^2)", 1)};
    const RationalVector start{Rational(1)};
    const SdeModel m = make_polynomial_model(g, parse_field("(x1^3)", 1), start);
    SimConfig c;
    c.steps = 64;
    c.paths = 200;
    EXPECT_THROW((void)simulate_paths(m, c), SimulationError);
}

TEST(Simulate, LimitIgnoresEps) {
    const auto g = catalog::grushin_like();
    const RationalVector o(2, Rational(0));
    const GradingResult r = build_graded_structure(g, o);
    const auto chart = std::get<AdaptedChart>(validate_adapted(catalog::grushin_like_chart(), g, r.structure));
    const NilpotentSystem sys = nilpotentize(g, chart);
    SimConfig c;
    c.steps = 32;
    c.paths = 100;
    c.eps = 0.01;
    const PathEnsemble a = simulate_limit(sys, c);
    c.eps = 1.0;
    const PathEnsemble b = simulate_limit(sys, c);
    EXPECT_EQ(a.terminal, b.terminal);
    EXPECT_EQ(a.config.eps, 1.0);
}

TEST(Localization, CutoffShape) {
    const RadialCutoff cut{1.0, 2.0};
    double grad[2];
    const double inside[] = {0.3, 0.4};
    EXPECT_EQ(cut.chi(inside, 2, grad), 1.0);
    const double outside[] = {3.0, 0.0};
    EXPECT_EQ(cut.chi(outside, 2, grad), 0.0);
    const double mid[] = {1.2, 0.5};
    const double c0 = cut.chi(mid, 2, grad);
    EXPECT_GT(c0, 0.0);
    EXPECT_LT(c0, 1.0);
    const double h = 1e-6;
    for (int k = 0; k < 2; ++k) {
        double p[] = {mid[0], mid[1]};
        double q[] = {mid[0], mid[1]};
        p[k] += h;
        q[k] -= h;
        double g2[2];
        const double fd = (cut.chi(p, 2, g2) - cut.chi(q, 2, g2)) / (2 * h);
        EXPECT_NEAR(grad[k], fd, 1e-7);
    }
}

TEST(Localization, AgreesWithPushforwardInsideAndIsBounded) {
    const auto g = catalog::grushin_like();
    const RationalVector o(2, Rational(0));
    const GradingResult r = build_graded_structure(g, o);
    const auto chart = std::get<AdaptedChart>(validate_adapted(catalog::grushin_like_chart(), g, r.structure));
    const SdeModel loc = localize_model(g, PolyVectorField::zero(2), chart, 1.0, 2.0);
    const SdeModel ad = make_adapted_model(g, PolyVectorField::zero(2), chart);
    ASSERT_EQ(loc.count(), 4u);
    std::vector<double> scratch;
    std::vector<double> dl(8), xl(2), da(4), xa(2);
    const double p[] = {0.3, -0.5};
    loc.fields->values(p, dl.data(), xl.data(), scratch);
    ad.fields->values(p, da.data(), xa.data(), scratch);
    for (int i = 0; i < 4; ++i) EXPECT_NEAR(dl[i], da[i], 1e-14);
    for (int i = 4; i < 8; ++i) EXPECT_EQ(dl[i], 0.0);
    for (int k = 0; k < 2; ++k) EXPECT_NEAR(xl[k], xa[k], 1e-14);
    const double far[] = {30.0, 40.0};
    loc.fields->values(far, dl.data(), xl.data(), scratch);
    for (int i = 0; i < 4; ++i) EXPECT_EQ(dl[i], 0.0);
    EXPECT_EQ(dl[4], 1.0);
    EXPECT_EQ(dl[7], 1.0);
    for (int k = 0; k < 2; ++k) EXPECT_EQ(xl[k], 0.0);
    // the localized system stays non-degenerate in the transition annulus
    SimConfig c;
    c.eps = 1.0;
    c.steps = 256;
    c.paths = 200;
    const PathEnsemble e = malliavin_covariance(loc, c);
    EXPECT_EQ(e.flagged, 0u);
    for (double l : e.lambda_min) EXPECT_GT(l, 0.0);
}

TEST(Localization, DriftJacobianMatchesFiniteDifferences) {
    const auto g = catalog::grushin_like();
    const RationalVector o(2, Rational(0));
    const GradingResult r = build_graded_structure(g, o);
    const auto chart = std::get<AdaptedChart>(validate_adapted(catalog::grushin_like_chart(), g, r.structure));
    const SdeModel loc = localize_model(g, parse_field("(x1, 0)", 2), chart, 0.5, 1.5);
    std::vector<double> scratch;
    std::vector<double> dj(4 * 4), xj(4), d(8), x0(2), d2(8), x2(2);
    const double p[] = {0.7, 0.4};
    loc.fields->jacobians(p, dj.data(), xj.data(), scratch);
    const double h = 1e-6;
    for (int j = 0; j < 2; ++j) {
        double a[] = {p[0], p[1]};
        double b[] = {p[0], p[1]};
        a[j] += h;
        b[j] -= h;
        loc.fields->values(a, d.data(), x0.data(), scratch);
        loc.fields->values(b, d2.data(), x2.data(), scratch);
        for (int k = 0; k < 2; ++k) EXPECT_NEAR(xj[k * 2 + j], (x0[k] - x2[k]) / (2 * h), 1e-5);
        for (int i = 0; i < 8; ++i) EXPECT_NEAR(dj[i * 2 + j], (d[i] - d2[i]) / (2 * h), 1e-6);
    }
}
