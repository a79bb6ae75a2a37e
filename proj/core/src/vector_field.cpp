#include "srl/vector_field.hpp"

#include <algorithm>

#include "srl/errors.hpp"

namespace srl {

PolyVectorField::PolyVectorField(std::vector<Polynomial> components) : components_(std::move(components)) {
    if (components_.empty()) throw InvalidArgument("vector field needs at least one component");
    for (const auto& c : components_) {
        if (c.dim() != components_.size()) {
            throw DimensionMismatch(components_.size(), c.dim(), "PolyVectorField");
        }
    }
}

PolyVectorField PolyVectorField::zero(std::size_t dim) {
    return PolyVectorField(std::vector<Polynomial>(dim, Polynomial(dim)));
}

PolyVectorField PolyVectorField::coordinate(std::size_t dim, std::size_t k) {
    std::vector<Polynomial> comps(dim, Polynomial(dim));
    comps.at(k) = Polynomial::constant(dim, 1);
    return PolyVectorField(std::move(comps));
}

bool PolyVectorField::is_zero() const {
    return std::all_of(components_.begin(), components_.end(), [](const Polynomial& p) { return p.is_zero(); });
}

unsigned PolyVectorField::degree() const {
    unsigned d = 0;
    for (const auto& c : components_) d = std::max(d, c.degree());
    return d;
}

Polynomial PolyVectorField::apply(const Polynomial& g) const {
    if (g.dim() != dim()) throw DimensionMismatch(dim(), g.dim(), "PolyVectorField::apply");
    Polynomial out(dim());
    for (std::size_t k = 0; k < dim(); ++k) {
        if (components_[k].is_zero()) continue;
        Polynomial dg = g.derivative(k);
        if (dg.is_zero()) continue;
        out += components_[k] * dg;
    }
    return out;
}

RationalVector PolyVectorField::evaluate(std::span<const Rational> point) const {
    RationalVector out;
    out.reserve(dim());
    for (const auto& c : components_) out.push_back(c.evaluate(point));
    return out;
}

std::vector<double> PolyVectorField::evaluate(std::span<const double> point) const {
    std::vector<double> out;
    out.reserve(dim());
    for (const auto& c : components_) out.push_back(c.evaluate(point));
    return out;
}

PolyVectorField& PolyVectorField::operator+=(const PolyVectorField& other) {
    if (other.dim() != dim()) throw DimensionMismatch(dim(), other.dim(), "PolyVectorField::operator+");
    for (std::size_t k = 0; k < dim(); ++k) components_[k] += other.components_[k];
    return *this;
}

PolyVectorField& PolyVectorField::operator-=(const PolyVectorField& other) {
    if (other.dim() != dim()) throw DimensionMismatch(dim(), other.dim(), "PolyVectorField::operator-");
    for (std::size_t k = 0; k < dim(); ++k) components_[k] -= other.components_[k];
    return *this;
}

PolyVectorField& PolyVectorField::operator*=(const Rational& c) {
    for (auto& p : components_) p *= c;
    return *this;
}

PolyVectorField PolyVectorField::operator-() const {
    PolyVectorField out = *this;
    for (auto& p : out.components_) p = -p;
    return out;
}

// ---------------------------------------------------------------------------

PolyMap::PolyMap(std::vector<Polynomial> components, std::optional<std::vector<Polynomial>> inverse)
    : components_(std::move(components)), inverse_(std::move(inverse)) {
    if (components_.empty()) throw InvalidArgument("map needs at least one component");
    const std::size_t d = components_.size();
    for (const auto& c : components_) {
        if (c.dim() != d) throw DimensionMismatch(d, c.dim(), "PolyMap");
    }
    if (inverse_) {
        if (inverse_->size() != d) throw DimensionMismatch(d, inverse_->size(), "PolyMap inverse");
        for (const auto& c : *inverse_) {
            if (c.dim() != d) throw DimensionMismatch(d, c.dim(), "PolyMap inverse");
        }
    }
}

PolyMap PolyMap::identity(std::size_t dim) {
    std::vector<Polynomial> comps;
    for (std::size_t k = 0; k < dim; ++k) comps.push_back(Polynomial::variable(dim, k));
    return PolyMap(comps, comps);
}

PolyMap PolyMap::translation(std::span<const Rational> point) {
    const std::size_t d = point.size();
    std::vector<Polynomial> fwd;
    std::vector<Polynomial> inv;
    for (std::size_t k = 0; k < d; ++k) {
        fwd.push_back(Polynomial::variable(d, k) - Polynomial::constant(d, point[k]));
        inv.push_back(Polynomial::variable(d, k) + Polynomial::constant(d, point[k]));
    }
    return PolyMap(std::move(fwd), std::move(inv));
}

const std::vector<Polynomial>& PolyMap::inverse() const {
    if (!inverse_) throw InvalidArgument("map has no polynomial inverse");
    return *inverse_;
}

bool PolyMap::inverse_is_exact(unsigned max_degree) const {
    if (!inverse_) return false;
    const std::size_t d = dim();
    for (std::size_t k = 0; k < d; ++k) {
        const Polynomial id = Polynomial::variable(d, k);
        if (components_[k].compose(*inverse_, max_degree) != id) return false;
        if ((*inverse_)[k].compose(components_, max_degree) != id) return false;
    }
    return true;
}

RationalVector PolyMap::evaluate(std::span<const Rational> point) const {
    RationalVector out;
    for (const auto& c : components_) out.push_back(c.evaluate(point));
    return out;
}

std::vector<RationalVector> PolyMap::jacobian_at(std::span<const Rational> point) const {
    const std::size_t d = dim();
    std::vector<RationalVector> jac(d, RationalVector(d));
    for (std::size_t k = 0; k < d; ++k) {
        for (std::size_t j = 0; j < d; ++j) jac[k][j] = components_[k].derivative(j).evaluate(point);
    }
    return jac;
}

PolyMap PolyMap::after(const PolyMap& inner, unsigned max_degree) const {
    if (inner.dim() != dim()) throw DimensionMismatch(dim(), inner.dim(), "PolyMap::after");
    std::vector<Polynomial> comps;
    for (const auto& c : components_) comps.push_back(c.compose(inner.components_, max_degree));
    std::optional<std::vector<Polynomial>> inv;
    if (inverse_ && inner.inverse_) {
        inv.emplace();
        for (const auto& c : *inner.inverse_) inv->push_back(c.compose(*inverse_, max_degree));
    }
    return PolyMap(std::move(comps), std::move(inv));
}

// ---------------------------------------------------------------------------

PolyVectorField lie_bracket(const PolyVectorField& x, const PolyVectorField& y) {
    if (x.dim() != y.dim()) throw DimensionMismatch(x.dim(), y.dim(), "lie_bracket");
    std::vector<Polynomial> comps;
    comps.reserve(x.dim());
    for (std::size_t k = 0; k < x.dim(); ++k) comps.push_back(x.apply(y[k]) - y.apply(x[k]));
    return PolyVectorField(std::move(comps));
}

PolyVectorField pushforward(const PolyMap& phi, const PolyVectorField& x, unsigned max_degree) {
    if (phi.dim() != x.dim()) throw DimensionMismatch(phi.dim(), x.dim(), "pushforward");
    const auto& inv = phi.inverse();
    std::vector<Polynomial> comps;
    comps.reserve(x.dim());
    for (const auto& c : phi.components()) comps.push_back(x.apply(c).compose(inv, max_degree));
    return PolyVectorField(std::move(comps));
}

PolyVectorField ito_drift_correction(const PolyVectorField& x0, std::span<const PolyVectorField> diffusion) {
    const std::size_t d = x0.dim();
    std::vector<Polynomial> half_sum(d, Polynomial(d));
    for (const auto& xi : diffusion) {
        if (xi.dim() != d) throw DimensionMismatch(d, xi.dim(), "ito_drift_correction");
        for (std::size_t k = 0; k < d; ++k) half_sum[k] += xi.apply(xi[k]);
    }
    PolyVectorField correction(std::move(half_sum));
    correction *= Rational(1, 2);
    return x0 + correction;
}

Polynomial apply_operator(std::span<const PolyVectorField> ops, const Polynomial& g) {
    Polynomial out = g;
    for (auto it = ops.rbegin(); it != ops.rend(); ++it) {
        if (it->dim() != g.dim()) throw DimensionMismatch(g.dim(), it->dim(), "apply_operator");
        out = it->apply(out);
    }
    return out;
}

int weighted_degree(const Exponent& alpha, const Weights& weights) {
    if (alpha.size() != weights.size()) throw DimensionMismatch(weights.size(), alpha.size(), "weighted_degree");
    int w = 0;
    for (std::size_t j = 0; j < alpha.size(); ++j) w += static_cast<int>(alpha[j]) * weights[j];
    return w;
}

int monomial_weight(const Exponent& alpha, std::size_t component, const Weights& weights) {
    return weights.at(component) - weighted_degree(alpha, weights);
}

int graded_weight(const PolyVectorField& x, const Weights& weights) {
    if (weights.size() != x.dim()) throw DimensionMismatch(x.dim(), weights.size(), "graded_weight");
    bool any = false;
    int best = 0;
    for (std::size_t k = 0; k < x.dim(); ++k) {
        for (const auto& [e, c] : x[k].terms()) {
            const int w = monomial_weight(e, k, weights);
            best = any ? std::min(best, w) : w;
            any = true;
        }
    }
    return any ? best : kWeightMinusInfinity;
}

PolyVectorField graded_truncate(const PolyVectorField& x, int n, const Weights& weights) {
    if (weights.size() != x.dim()) throw DimensionMismatch(x.dim(), weights.size(), "graded_truncate");
    std::vector<Polynomial> comps(x.dim(), Polynomial(x.dim()));
    for (std::size_t k = 0; k < x.dim(); ++k) {
        for (const auto& [e, c] : x[k].terms()) {
            if (monomial_weight(e, k, weights) >= n) comps[k].add_term(e, c);
        }
    }
    return PolyVectorField(std::move(comps));
}

}  // namespace srl
