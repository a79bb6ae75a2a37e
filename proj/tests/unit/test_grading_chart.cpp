#include <gtest/gtest.h>

#include "random_systems.hpp"
#include "srl/catalog.hpp"
#include "srl/chart.hpp"
#include "srl/errors.hpp"
#include "srl/grading.hpp"
#include "srl/poly_text.hpp"

using namespace srl;

namespace {

RationalVector origin(std::size_t d) { return RationalVector(d, Rational(0)); }

}  // namespace

TEST(Grading, GrushinLikeFlag) {
    const auto g = catalog::grushin_like();
    const GradingResult r = build_graded_structure(g, origin(2));
    EXPECT_EQ(r.structure.flag(), (std::vector<std::size_t>{1, 1, 2}));
    EXPECT_EQ(r.structure.step(), 3u);
    EXPECT_EQ(r.structure.weights(), (Weights{1, 3}));
    EXPECT_EQ(r.structure.homogeneous_dimension(), 4);
}

TEST(Grading, HeisenbergAndElliptic) {
    const GradingResult h = build_graded_structure(catalog::heisenberg(), origin(3));
    EXPECT_EQ(h.structure.weights(), (Weights{1, 1, 2}));
    EXPECT_EQ(h.structure.homogeneous_dimension(), 4);
    const GradingResult e = build_graded_structure(catalog::elliptic(3), origin(3));
    EXPECT_EQ(e.structure.step(), 1u);
    EXPECT_EQ(e.structure.homogeneous_dimension(), 3);
}

TEST(Grading, AwayFromTheDegenerateLine) {
    // at x1 = 1 the grushin-like system is elliptic
    const RationalVector p{Rational(1), Rational(0)};
    const GradingResult r = build_graded_structure(catalog::grushin_like(), p);
    EXPECT_EQ(r.structure.flag(), (std::vector<std::size_t>{2}));
}

TEST(Grading, HormanderFailureReportsFlag) {
    const std::vector<PolyVectorField> g{PolyVectorField::coordinate(2, 0)};
    try {
        (void)build_graded_structure(g, origin(2), 4);
        FAIL();
    } catch (const HormanderFailure& e) {
        EXPECT_EQ(e.flag(), (std::vector<std::size_t>{1, 1, 1, 1}));
    }
}

TEST(Grading, FlagIsNonDecreasingAndWeightsMatchDefinition) {
    std::mt19937_64 rng(3);
    int graded = 0;
    for (int i = 0; i < 60; ++i) {
        const std::size_t d = 2 + i % 3;
        std::vector<PolyVectorField> g{gen::random_field(rng, d, 2, 2), gen::random_field(rng, d, 2, 2)};
        try {
            const GradingResult r = build_graded_structure(g, origin(d), 6);
            ++graded;
            const auto& f = r.structure.flag();
            for (std::size_t n = 1; n < f.size(); ++n) EXPECT_LE(f[n - 1], f[n]);
            for (std::size_t k = 0; k < d; ++k) {
                std::size_t l = 1;
                while (r.structure.flag_dim(l) < k + 1) ++l;
                EXPECT_EQ(r.structure.weights()[k], static_cast<int>(l));
            }
        } catch (const HormanderFailure&) {
        }
    }
    EXPECT_GT(graded, 10);
}

TEST(Grading, DriftInSpan) {
    const auto g = catalog::grushin_like();
    const std::vector<std::vector<double>> pts{{0.3, -0.2}, {-0.5, 0.7}};
    EXPECT_TRUE(check_drift_in_span(parse_field("(x1, 0)", 2), g, origin(2), pts).ok());
    const auto bad = check_drift_in_span(parse_field("(0, 1)", 2), g, origin(2), pts);
    EXPECT_FALSE(bad.base_point_ok);
}

TEST(Grading, DilationRoundTrip) {
    const Weights w{1, 3};
    const std::vector<double> p{0.4, -1.2};
    const auto q = dilate(p, 0.01, w);
    EXPECT_NEAR(q[0], 0.04, 1e-15);
    EXPECT_NEAR(q[1], -1.2e-3, 1e-15);
    const auto back = dilate_inverse(q, 0.01, w);
    EXPECT_NEAR(back[0], p[0], 1e-14);
    EXPECT_NEAR(back[1], p[1], 1e-14);
}

TEST(Chart, IdentityViolatesVanishingCondition) {
    const auto g = catalog::grushin_like();
    const GradingResult r = build_graded_structure(g, origin(2));
    const auto v = validate_adapted(PolyMap::identity(2), g, r.structure);
    ASSERT_TRUE(std::holds_alternative<ChartViolation>(v));
    const auto& violation = std::get<ChartViolation>(v);
    EXPECT_EQ(violation.condition, ChartViolation::Condition::vanishing);
    EXPECT_EQ(violation.n, 2u);
    EXPECT_EQ(violation.k, 1u);
    EXPECT_EQ(violation.word, (Word{0, 0}));
    EXPECT_EQ(violation.value, Rational(1));
}

TEST(Chart, KnownChartValidates) {
    const auto g = catalog::grushin_like();
    const GradingResult r = build_graded_structure(g, origin(2));
    const auto v = validate_adapted(catalog::grushin_like_chart(), g, r.structure);
    ASSERT_TRUE(std::holds_alternative<AdaptedChart>(v));
    for (const auto& c : std::get<AdaptedChart>(v).certificate()) EXPECT_EQ(c.value, 0);
}

TEST(Chart, AlignmentFailureIsReported) {
    // swapping coordinates puts the first flag direction on a weight-3 coordinate
    const auto g = catalog::grushin_like();
    const GradingResult r = build_graded_structure(g, origin(2));
    const PolyMap swap({parse_polynomial("x2", 2), parse_polynomial("x1", 2)},
                       std::vector<Polynomial>{parse_polynomial("y2", 2), parse_polynomial("y1", 2)});
    const auto v = validate_adapted(swap, g, r.structure);
    ASSERT_TRUE(std::holds_alternative<ChartViolation>(v));
    EXPECT_EQ(std::get<ChartViolation>(v).condition, ChartViolation::Condition::alignment);
}

TEST(Chart, ValidationPreconditions) {
    const auto g = catalog::grushin_like();
    const GradingResult r = build_graded_structure(g, origin(2));
    const PolyMap no_inverse({parse_polynomial("x1", 2), parse_polynomial("x2", 2)});
    EXPECT_THROW((void)validate_adapted(no_inverse, g, r.structure), InvalidArgument);
    const RationalVector shift{Rational(1), Rational(0)};
    EXPECT_THROW((void)validate_adapted(PolyMap::translation(shift), g, r.structure), InvalidArgument);
}

TEST(Chart, ConstructedChartsValidate) {
    const auto g = catalog::grushin_like();
    const GradingResult r = build_graded_structure(g, origin(2));
    const AdaptedChart c = construct_adapted(g, r);
    EXPECT_TRUE(c.theta().inverse_is_exact());
    EXPECT_TRUE(std::holds_alternative<AdaptedChart>(validate_adapted(c.theta(), g, r.structure)));

    const RationalVector p{Rational(1, 2), Rational(-1), Rational(2)};
    const auto h = catalog::heisenberg();
    const GradingResult rh = build_graded_structure(h, p);
    const AdaptedChart ch = construct_adapted(h, rh);
    EXPECT_TRUE(std::holds_alternative<AdaptedChart>(validate_adapted(ch.theta(), h, rh.structure)));
    EXPECT_EQ(ch.theta().evaluate(p), RationalVector(3, Rational(0)));
}

TEST(Chart, ConstructionOnRandomSystems) {
    std::mt19937_64 rng(21);
    int built = 0;
    for (int i = 0; i < 40; ++i) {
        const std::size_t d = 2 + i % 2;
        std::vector<PolyVectorField> g{gen::random_field(rng, d, 2, 2), gen::random_field(rng, d, 2, 2)};
        std::optional<GradingResult> r;
        try {
            r = build_graded_structure(g, origin(d), 5);
        } catch (const HormanderFailure&) {
            continue;
        }
        const AdaptedChart c = construct_adapted(g, *r);
        EXPECT_TRUE(std::holds_alternative<AdaptedChart>(validate_adapted(c.theta(), g, r->structure)));
        ++built;
    }
    EXPECT_GT(built, 5);
}
