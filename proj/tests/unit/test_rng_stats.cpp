#include <gtest/gtest.h>

#include <cmath>

#include "srl/rng.hpp"
#include "srl/stats.hpp"

using namespace srl;

TEST(Philox, KnownAnswerVectors) {
    using B = Philox4x32::Block;
    EXPECT_EQ(Philox4x32::encrypt(B{0, 0, 0, 0}, {0, 0}), (B{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8}));
    EXPECT_EQ(Philox4x32::encrypt(B{0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}),
              (B{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd}));
    EXPECT_EQ(Philox4x32::encrypt(B{0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}),
              (B{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1}));
}

TEST(Philox, StreamsAreReproducibleAndDistinct) {
    Philox4x32 a(42, 3);
    Philox4x32 b(42, 3);
    Philox4x32 c(42, 4);
    int same = 0;
    for (int i = 0; i < 100; ++i) {
        const auto x = a.next_u32();
        EXPECT_EQ(x, b.next_u32());
        same += x == c.next_u32();
    }
    EXPECT_LT(same, 3);
}

TEST(Philox, UniformAndNormalMoments) {
    Philox4x32 r(1, 0);
    const int n = 200000;
    std::vector<double> u(n);
    std::vector<double> z(n);
    for (int i = 0; i < n; ++i) {
        u[i] = r.next_uniform();
        ASSERT_GT(u[i], 0.0);
        ASSERT_LT(u[i], 1.0);
    }
    for (int i = 0; i < n; ++i) z[i] = r.next_normal();
    EXPECT_GT(ks_uniform(u).p_value, 1e-3);
    EXPECT_NEAR(mean(z), 0.0, 5.0 / std::sqrt(n));
    EXPECT_NEAR(variance(z), 1.0, 5.0 * std::sqrt(2.0 / n));
    double m4 = 0;
    for (double x : z) m4 += x * x * x * x;
    EXPECT_NEAR(m4 / n, 3.0, 0.1);
}

TEST(Stats, BasicMoments) {
    const std::vector<double> x{1, 2, 3, 4};
    EXPECT_DOUBLE_EQ(mean(x), 2.5);
    EXPECT_DOUBLE_EQ(variance(x), 5.0 / 3.0);
    EXPECT_DOUBLE_EQ(quantile(x, 0.5), 2.5);
    EXPECT_DOUBLE_EQ(quantile(x, 0.0), 1.0);
    EXPECT_DOUBLE_EQ(quantile(x, 1.0 / 3.0), 2.0);
}

TEST(Stats, KolmogorovTail) {
    // P(sqrt(n) D > 1.36) is about 0.05 for large n
    EXPECT_NEAR(kolmogorov_pvalue(1.36 / std::sqrt(1e6), 1e6), 0.05, 0.002);
    EXPECT_DOUBLE_EQ(kolmogorov_pvalue(0.0, 100), 1.0);
}

TEST(Stats, KsNullPValuesAreUniform) {
    Philox4x32 r(9, 0);
    std::vector<double> pvals;
    for (int rep = 0; rep < 300; ++rep) {
        std::vector<double> a(500);
        std::vector<double> b(400);
        for (auto& x : a) x = r.next_normal();
        for (auto& x : b) x = r.next_normal();
        pvals.push_back(ks_two_sample(a, b).p_value);
    }
    EXPECT_GT(ks_uniform(pvals).p_value, 1e-3);
}

TEST(Stats, KsDetectsShiftAndWeightsMatter) {
    Philox4x32 r(10, 0);
    std::vector<double> a(2000);
    std::vector<double> b(2000);
    for (auto& x : a) x = r.next_normal();
    for (auto& x : b) x = r.next_normal() + 0.3;
    const KsResult k = ks_two_sample(a, b);
    EXPECT_GT(k.statistic, 0.08);
    EXPECT_LT(k.p_value, 1e-6);
    // unit weights reproduce the unweighted statistic
    const std::vector<double> ones(a.size(), 1.0);
    EXPECT_NEAR(ks_two_sample_weighted(a, ones, b, {}).statistic, k.statistic, 1e-12);
}

TEST(Stats, EffectiveSampleSize) {
    const std::vector<double> w{1, 1, 1, 1};
    EXPECT_DOUBLE_EQ(effective_sample_size(w), 4.0);
    const std::vector<double> v{1, 0, 0, 0};
    EXPECT_DOUBLE_EQ(effective_sample_size(v), 1.0);
}

TEST(Stats, EnergyDistanceNullAndAlternative) {
    Philox4x32 r(12, 0);
    std::vector<double> a(2 * 600);
    std::vector<double> b(2 * 600);
    std::vector<double> c(2 * 600);
    for (auto& x : a) x = r.next_normal();
    for (auto& x : b) x = r.next_normal();
    for (std::size_t i = 0; i < c.size(); ++i) c[i] = r.next_normal() * (i % 2 ? 1.5 : 1.0);
    const EnergyTest null = energy_distance_test(a, b, 2, 200, 3);
    EXPECT_GT(null.p_value, 0.01);
    EXPECT_NEAR(null.statistic, 0.0, 0.02);
    const EnergyTest alt = energy_distance_test(a, c, 2, 200, 3);
    EXPECT_LT(alt.p_value, 0.01);
    EXPECT_GT(alt.statistic, null.statistic);
}

TEST(Stats, LineFits) {
    const std::vector<double> x{0, 1, 2, 3};
    const std::vector<double> y{1, 3, 5, 7};
    const LinearFit f = fit_line(x, y);
    EXPECT_NEAR(f.slope, 2.0, 1e-12);
    EXPECT_NEAR(f.intercept, 1.0, 1e-12);
    EXPECT_NEAR(f.slope_se, 0.0, 1e-12);
    const std::vector<double> s{1, 1, 1, 1};
    const LinearFit w = fit_line_weighted(x, y, s);
    EXPECT_NEAR(w.slope, 2.0, 1e-12);
    EXPECT_NEAR(w.slope_se, 1.0 / std::sqrt(5.0), 1e-12);
}
