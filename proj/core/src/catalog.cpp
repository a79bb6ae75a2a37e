#include "srl/catalog.hpp"

namespace srl::catalog {

namespace {

Polynomial var(std::size_t d, std::size_t k) { return Polynomial::variable(d, k); }
Polynomial one(std::size_t d) { return Polynomial::constant(d, 1); }
Polynomial zero(std::size_t d) { return Polynomial(d); }

}  // namespace

std::vector<PolyVectorField> grushin_like() {
    return {PolyVectorField({one(2), var(2, 0)}), PolyVectorField({var(2, 0), zero(2)})};
}

PolyMap grushin_like_chart() {
    const Rational half(1, 2);
    Polynomial x1sq = var(2, 0) * var(2, 0);
    return PolyMap({var(2, 0), var(2, 1) - half * x1sq}, std::vector<Polynomial>{var(2, 0), var(2, 1) + half * x1sq});
}

std::vector<PolyVectorField> heisenberg() {
    const Rational half(1, 2);
    return {PolyVectorField({one(3), zero(3), -(half * var(3, 1))}),
            PolyVectorField({zero(3), one(3), half * var(3, 0)})};
}

std::vector<PolyVectorField> elliptic(std::size_t d) {
    std::vector<PolyVectorField> out;
    for (std::size_t k = 0; k < d; ++k) out.push_back(PolyVectorField::coordinate(d, k));
    return out;
}

}  // namespace srl::catalog
