#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "srl/polynomial.hpp"

namespace srl {

class PolyVectorField;

/// Names of the coordinate variables, in order. Besides these names the parser
/// always accepts the aliases x1..xd and y1..yd.
using VariableNames = std::vector<std::string>;

VariableNames default_names(std::size_t dim, char prefix = 'x');

/// Parses `x1^2*x2 - 1/2*x3`-style text. Supports + - * / ^, parentheses,
/// integer, decimal and rational literals. Division is only allowed by a
/// nonzero constant. Errors carry the column (1-based) and the given line.
Polynomial parse_polynomial(std::string_view text, std::size_t dim, const VariableNames& names = {},
                            std::size_t line = 1, std::size_t column_offset = 0);

/// Canonical printing, highest graded-lex term first. Round-trips through
/// parse_polynomial.
std::string to_string(const Polynomial& p, const VariableNames& names = {});

std::string to_string(const Rational& q);

/// A vector field written as a parenthesised component list `(p1, p2, ...)`.
PolyVectorField parse_field(std::string_view text, std::size_t dim, const VariableNames& names = {},
                            std::size_t line = 1, std::size_t column_offset = 0);

std::vector<Polynomial> parse_polynomial_list(std::string_view text, std::size_t dim,
                                              const VariableNames& names = {}, std::size_t line = 1,
                                              std::size_t column_offset = 0);

std::string to_string(const PolyVectorField& field, const VariableNames& names = {});

/// Exact rational literal (`3`, `-3/2`, `0.25`).
Rational parse_rational(std::string_view text);

}  // namespace srl
