#include <gtest/gtest.h>

#include "srl/catalog.hpp"
#include "srl/nilpotent.hpp"
#include "srl/poly_text.hpp"

using namespace srl;

namespace {

NilpotentSystem grushin_limit() {
    const auto g = catalog::grushin_like();
    const RationalVector o(2, Rational(0));
    const GradingResult r = build_graded_structure(g, o);
    const auto chart = std::get<AdaptedChart>(validate_adapted(catalog::grushin_like_chart(), g, r.structure));
    return nilpotentize(g, chart);
}

}  // namespace

TEST(Nilpotent, GrushinLikeLimit) {
    const NilpotentSystem s = grushin_limit();
    ASSERT_EQ(s.fields.size(), 2u);
    EXPECT_EQ(s.fields[0], parse_field("(1, 0)", 2));
    EXPECT_EQ(s.fields[1], parse_field("(0, -y1^2)", 2));
    EXPECT_TRUE(s.drift_tilde.is_zero());
}

TEST(Nilpotent, StructuralChecksPass) {
    const NilpotentSystem s = grushin_limit();
    for (const auto& c : check_homogeneity(s)) EXPECT_TRUE(c.passed) << c.detail;
    for (const auto& c : check_cascade(s)) EXPECT_TRUE(c.passed) << c.detail;
    for (const auto& l : check_bracket_flag(s)) EXPECT_TRUE(l.passed());
    const std::vector<std::vector<double>> pts{{0.0, 0.0}, {0.7, -3.0}, {-2.0, 1.0}};
    for (const auto& p : check_strong_hormander_everywhere(s, pts)) EXPECT_TRUE(p.passed);
}

TEST(Nilpotent, HeisenbergIsItsOwnLimit) {
    const auto h = catalog::heisenberg();
    const RationalVector o(3, Rational(0));
    const GradingResult r = build_graded_structure(h, o);
    const auto chart = std::get<AdaptedChart>(validate_adapted(PolyMap::identity(3), h, r.structure));
    const NilpotentSystem s = nilpotentize(h, chart);
    EXPECT_EQ(s.fields[0], h[0]);
    EXPECT_EQ(s.fields[1], h[1]);
    const std::vector<Rational> grid{Rational(1, 4), Rational(1, 9)};
    const auto conv = check_convergence_to_nilpotent(h, chart, grid);
    EXPECT_TRUE(conv.passed);
    EXPECT_TRUE(conv.terms.empty());
}

TEST(Nilpotent, ResidualScalesWithSqrtEps) {
    const auto g = catalog::grushin_like();
    const RationalVector o(2, Rational(0));
    const GradingResult r = build_graded_structure(g, o);
    const auto chart = std::get<AdaptedChart>(validate_adapted(catalog::grushin_like_chart(), g, r.structure));
    const std::vector<Rational> grid{Rational(1, 4), Rational(1, 16), Rational(1, 100)};
    const auto conv = check_convergence_to_nilpotent(g, chart, grid);
    EXPECT_TRUE(conv.passed);
    // the y1 d/dy1 term of theta_* X2 has weight 0 and scales like eps^{1/2}
    ASSERT_EQ(conv.terms.size(), 1u);
    EXPECT_EQ(conv.terms[0].eps_power, 1);
    EXPECT_EQ(conv.max_gap[1][0], Rational(1, 2));
    EXPECT_EQ(conv.max_gap[1][2], Rational(1, 10));
}

TEST(Nilpotent, ChecksRejectUntruncatedFields) {
    NilpotentSystem s = grushin_limit();
    s.fields[1] = parse_field("(y1, -y1^2)", 2);
    EXPECT_FALSE(check_homogeneity(s)[1].passed);
    s.fields[1] = parse_field("(0, -y2)", 2);
    EXPECT_FALSE(check_cascade(s)[1].passed);
}

TEST(Nilpotent, RescaleField) {
    const Weights w{1, 3};
    const PolyVectorField y = parse_field("(y1, -y1^2)", 2);
    EXPECT_EQ(rescale_field(y, Rational(1, 2), w), parse_field("(1/2*y1, -y1^2)", 2));
}

TEST(Nilpotent, ExactSqrt) {
    EXPECT_EQ(exact_sqrt(Rational(9, 4)), Rational(3, 2));
    EXPECT_FALSE(exact_sqrt(Rational(2)).has_value());
    EXPECT_FALSE(exact_sqrt(Rational(-1)).has_value());
}
