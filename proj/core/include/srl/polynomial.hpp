#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include <gmpxx.h>

namespace srl {

using Rational = mpq_class;
using RationalVector = std::vector<Rational>;

/// Exponent multi-index (alpha_1, ..., alpha_d) of a monomial y^alpha.
using Exponent = std::vector<std::uint32_t>;

/// Cap on the total degree of composition and pushforward results.
inline constexpr unsigned kDefaultMaxDegree = 16;

unsigned total_degree(const Exponent& e);

/// Graded lexicographic order: total degree first, then lexicographic.
struct GradedLexLess {
    bool operator()(const Exponent& a, const Exponent& b) const;
};

/// Sparse multivariate polynomial with exact rational coefficients.
///
/// Terms are kept in graded-lex order and zero coefficients are never stored,
/// so two polynomials are equal iff their term maps are equal.
class Polynomial {
public:
    using TermMap = std::map<Exponent, Rational, GradedLexLess>;

    explicit Polynomial(std::size_t dim);

    static Polynomial constant(std::size_t dim, const Rational& c);
    /// The coordinate function y^{k+1} (k is zero-based).
    static Polynomial variable(std::size_t dim, std::size_t k);
    static Polynomial monomial(Exponent exponent, const Rational& c);

    std::size_t dim() const { return dim_; }
    const TermMap& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    bool is_constant() const;
    std::size_t term_count() const { return terms_.size(); }
    /// Total degree; 0 for constants and for the zero polynomial.
    unsigned degree() const;

    Rational coefficient(const Exponent& e) const;
    Rational constant_term() const;

    /// Adds c * y^e, dropping the term if the coefficient cancels.
    void add_term(const Exponent& e, const Rational& c);

    Polynomial& operator+=(const Polynomial& other);
    Polynomial& operator-=(const Polynomial& other);
    Polynomial& operator*=(const Polynomial& other);
    Polynomial& operator*=(const Rational& c);

    friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
    friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
    friend Polynomial operator*(const Polynomial& a, const Polynomial& b);
    friend Polynomial operator*(Polynomial a, const Rational& c) { return a *= c; }
    friend Polynomial operator*(const Rational& c, Polynomial a) { return a *= c; }
    Polynomial operator-() const;

    bool operator==(const Polynomial& other) const;

    Polynomial derivative(std::size_t k) const;
    Polynomial pow(unsigned n) const;

    Rational evaluate(std::span<const Rational> point) const;
    double evaluate(std::span<const double> point) const;

    /// Substitutes subs[j] for y^{j+1}. All substitutes share one dimension,
    /// which becomes the dimension of the result.
    /// Throws DegreeOverflow when the result degree exceeds max_degree.
    Polynomial compose(std::span<const Polynomial> subs, unsigned max_degree = kDefaultMaxDegree) const;

    std::size_t hash() const;

private:
    void require_same_dim(const Polynomial& other, const char* where) const;

    std::size_t dim_;
    TermMap terms_;
};

}  // namespace srl
