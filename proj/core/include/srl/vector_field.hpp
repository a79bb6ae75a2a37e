#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "srl/polynomial.hpp"

namespace srl {

/// Polynomial vector field sum_k X^k d/dy^k on R^d.
class PolyVectorField {
public:
    explicit PolyVectorField(std::vector<Polynomial> components);

    static PolyVectorField zero(std::size_t dim);
    /// The constant field d/dy^{k+1}.
    static PolyVectorField coordinate(std::size_t dim, std::size_t k);

    std::size_t dim() const { return components_.size(); }
    const Polynomial& operator[](std::size_t k) const { return components_[k]; }
    const std::vector<Polynomial>& components() const { return components_; }
    bool is_zero() const;
    unsigned degree() const;

    /// Directional derivative X g = sum_k X^k dg/dy^k.
    Polynomial apply(const Polynomial& g) const;

    RationalVector evaluate(std::span<const Rational> point) const;
    std::vector<double> evaluate(std::span<const double> point) const;

    PolyVectorField& operator+=(const PolyVectorField& other);
    PolyVectorField& operator-=(const PolyVectorField& other);
    PolyVectorField& operator*=(const Rational& c);
    friend PolyVectorField operator+(PolyVectorField a, const PolyVectorField& b) { return a += b; }
    friend PolyVectorField operator-(PolyVectorField a, const PolyVectorField& b) { return a -= b; }
    friend PolyVectorField operator*(const Rational& c, PolyVectorField a) { return a *= c; }
    PolyVectorField operator-() const;
    bool operator==(const PolyVectorField& other) const { return components_ == other.components_; }

private:
    std::vector<Polynomial> components_;
};

/// Polynomial map R^d -> R^d with an optional polynomial inverse.
class PolyMap {
public:
    explicit PolyMap(std::vector<Polynomial> components,
                     std::optional<std::vector<Polynomial>> inverse = std::nullopt);

    static PolyMap identity(std::size_t dim);
    /// y = x - point, with inverse x = y + point.
    static PolyMap translation(std::span<const Rational> point);

    std::size_t dim() const { return components_.size(); }
    const std::vector<Polynomial>& components() const { return components_; }
    bool has_inverse() const { return inverse_.has_value(); }
    const std::vector<Polynomial>& inverse() const;

    /// Exact check that both compositions simplify to the coordinate functions.
    bool inverse_is_exact(unsigned max_degree = kDefaultMaxDegree) const;

    RationalVector evaluate(std::span<const Rational> point) const;
    /// Jacobian d(component k)/dy^j at the point, row-major.
    std::vector<RationalVector> jacobian_at(std::span<const Rational> point) const;

    /// this o inner (apply inner first). The inverse composes when both exist.
    PolyMap after(const PolyMap& inner, unsigned max_degree = kDefaultMaxDegree) const;

private:
    std::vector<Polynomial> components_;
    std::optional<std::vector<Polynomial>> inverse_;
};

/// [X, Y] = (JY) X - (JX) Y.
PolyVectorField lie_bracket(const PolyVectorField& x, const PolyVectorField& y);

/// phi_* X = (J phi . X) o phi^{-1}, exactly. Requires phi to carry its inverse.
PolyVectorField pushforward(const PolyMap& phi, const PolyVectorField& x,
                            unsigned max_degree = kDefaultMaxDegree);

/// X0 + 1/2 sum_i (J X_i) X_i: the Ito drift for Stratonovich fields.
PolyVectorField ito_drift_correction(const PolyVectorField& x0, std::span<const PolyVectorField> diffusion);

/// Y_1(Y_2(...(Y_n g))).
Polynomial apply_operator(std::span<const PolyVectorField> ops, const Polynomial& g);

using Weights = std::vector<int>;

/// Weight of the zero field.
inline constexpr int kWeightMinusInfinity = std::numeric_limits<int>::min();

/// Weight of y^alpha d/dy^k: w_k - sum_j alpha_j w_j.
int monomial_weight(const Exponent& alpha, std::size_t component, const Weights& weights);

/// Weighted degree sum_j alpha_j w_j of y^alpha.
int weighted_degree(const Exponent& alpha, const Weights& weights);

/// Smallest weight over all monomial terms; kWeightMinusInfinity for zero.
int graded_weight(const PolyVectorField& x, const Weights& weights);

/// Keeps exactly the monomial terms of weight >= n.
PolyVectorField graded_truncate(const PolyVectorField& x, int n, const Weights& weights);

}  // namespace srl
