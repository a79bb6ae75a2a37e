#include <gtest/gtest.h>

#include "srl/errors.hpp"
#include "srl/model_file.hpp"
#include "srl/poly_text.hpp"

using namespace srl;

namespace {

const char* kGood = R"(# comment
name = demo
dim = 2
variables = a, b
base_point = (0, 1/2)
drift = (a, 0)

[generators]
X1 = (1, a)   # trailing comment
X2 = (a, 0)

[chart]
theta = (a, b - 1/2 - 1/2*a^2)
inverse = (y1, y2 + 1/2 + 1/2*y1^2)

[simulation]
eps = 0.01
paths = 5000
seed = 7
)";

void expect_error_at(const std::string& text, std::size_t line, std::size_t column) {
    try {
        (void)parse_model_file(text);
        FAIL() << "no error for\n" << text;
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), line) << e.what();
        EXPECT_EQ(e.column(), column) << e.what();
    }
}

}  // namespace

TEST(ModelFile, ParsesAllSections) {
    const ModelFile m = parse_model_file(kGood);
    EXPECT_EQ(m.name, "demo");
    EXPECT_EQ(m.dim, 2u);
    EXPECT_EQ(m.variables, (VariableNames{"a", "b"}));
    EXPECT_EQ(m.base_point, (RationalVector{Rational(0), Rational(1, 2)}));
    ASSERT_EQ(m.generators.size(), 2u);
    EXPECT_EQ(m.generator_names[1], "X2");
    EXPECT_EQ(m.generators[0], parse_field("(1, x1)", 2));
    ASSERT_TRUE(m.drift.has_value());
    ASSERT_TRUE(m.chart.has_value());
    EXPECT_TRUE(m.chart->inverse_is_exact());
    EXPECT_EQ(m.simulation.eps, 0.01);
    EXPECT_EQ(m.simulation.paths, 5000u);
    EXPECT_EQ(m.simulation.seed, 7u);
    EXPECT_FALSE(m.simulation.steps.has_value());
}

TEST(ModelFile, CanonicalTextRoundTrips) {
    const ModelFile m = parse_model_file(kGood);
    const std::string text = to_text(m);
    const ModelFile back = parse_model_file(text);
    EXPECT_EQ(to_text(back), text);
    EXPECT_EQ(back.generators, m.generators);
    EXPECT_EQ(back.base_point, m.base_point);
    EXPECT_EQ(back.chart->components(), m.chart->components());
    EXPECT_EQ(back.chart->inverse(), m.chart->inverse());
    EXPECT_EQ(back.simulation.eps, m.simulation.eps);
}

TEST(ModelFile, BundledModelsLoad) {
    for (const char* f : {"example_grushin_like.model", "heisenberg.model", "elliptic2d.model"}) {
        const ModelFile m = load_model_file(std::string(SRL_MODELS_DIR) + "/" + f);
        EXPECT_FALSE(m.generators.empty()) << f;
        EXPECT_EQ(parse_model_file(to_text(m)).generators, m.generators) << f;
    }
    EXPECT_THROW((void)load_model_file("/nonexistent/file.model"), Error);
}

TEST(ModelFile, ErrorsCarryLineAndColumn) {
    expect_error_at("name = a\ndim = 2\nbogus = 1\n", 3, 1);
    expect_error_at("dim = 2\ndim = 3\n", 2, 1);
    expect_error_at("dim = 2\nbase_point = (0, 0)\n[generators]\nX1 = (1, x1 + * 2)\n", 4, 15);
    expect_error_at("dim = 2\n[nope]\n", 2, 1);
    expect_error_at("dim = 2\nbase_point = (0, 0)\n[generators]\nX1 = (1, 0, 0)\n", 4, 6);
    expect_error_at("dim = 2\nbase_point = (0)\n[generators]\nX1 = (1, 0)\n", 2, 14);
    EXPECT_THROW((void)parse_model_file("dim = 2\nbase_point = (0, 0)\n"), ParseError);
}
