#pragma once

#include <cstddef>
#include <vector>

#include "srl/vector_field.hpp"

namespace srl::catalog {

/// X1 = d1 + x1 d2, X2 = x1 d1 on R^2.
std::vector<PolyVectorField> grushin_like();
/// theta = (x1, x2 - x1^2 / 2) with its inverse.
PolyMap grushin_like_chart();
/// X1 = d1 - x2/2 d3, X2 = d2 + x1/2 d3 on R^3.
std::vector<PolyVectorField> heisenberg();
/// X_i = e_i on R^d.
std::vector<PolyVectorField> elliptic(std::size_t d);

}  // namespace srl::catalog
