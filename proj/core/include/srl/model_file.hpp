#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "srl/poly_text.hpp"
#include "srl/vector_field.hpp"

namespace srl {

struct SimulationDefaults {
    std::optional<double> eps;
    std::optional<std::size_t> paths;
    std::optional<std::size_t> steps;
    std::optional<std::uint64_t> seed;
    std::optional<double> radius;
};

/// A driving system on R^dim: generators X_i, generator drift X0, base point
/// and an optional chart with its polynomial inverse.
struct ModelFile {
    std::string name;
    std::size_t dim = 0;
    VariableNames variables;
    RationalVector base_point;
    std::vector<std::string> generator_names;
    std::vector<PolyVectorField> generators;
    std::optional<PolyVectorField> drift;
    std::size_t max_depth = 8;
    std::optional<PolyMap> chart;
    SimulationDefaults simulation;

    PolyVectorField drift_or_zero() const { return drift ? *drift : PolyVectorField::zero(dim); }
};

/// Grammar (one statement per line, `#` starts a comment):
///
///     name = <identifier>
///     dim = <positive integer>
///     variables = <name>, <name>, ...      (optional, default x1..xd)
///     base_point = (<rational>, ...)
///     drift = (<poly>, ...)                 (optional)
///     max_depth = <integer>                 (optional)
///     [generators]
///     <label> = (<poly>, ...)               (one or more)
///     [chart]                               (optional)
///     theta = (<poly>, ...)
///     inverse = (<poly>, ...)
///     [simulation]                          (optional)
///     eps | paths | steps | seed | radius = <number>
///
/// Errors are ParseError with 1-based line and column.
ModelFile parse_model_file(std::string_view text);
ModelFile load_model_file(const std::string& path);
/// Canonical text that parses back to an equal ModelFile.
std::string to_text(const ModelFile& model);

}  // namespace srl
