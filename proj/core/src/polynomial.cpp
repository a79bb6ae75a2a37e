#include "srl/polynomial.hpp"

#include <algorithm>
#include <functional>
#include <numeric>

#include "srl/errors.hpp"

namespace srl {

unsigned total_degree(const Exponent& e) {
    return std::accumulate(e.begin(), e.end(), 0u);
}

bool GradedLexLess::operator()(const Exponent& a, const Exponent& b) const {
    const unsigned da = total_degree(a);
    const unsigned db = total_degree(b);
    if (da != db) return da < db;
    return a < b;
}

Polynomial::Polynomial(std::size_t dim) : dim_(dim) {
    if (dim == 0) throw InvalidArgument("polynomial dimension must be positive");
}

Polynomial Polynomial::constant(std::size_t dim, const Rational& c) {
    Polynomial p(dim);
    p.add_term(Exponent(dim, 0), c);
    return p;
}

Polynomial Polynomial::variable(std::size_t dim, std::size_t k) {
    if (k >= dim) throw InvalidArgument("variable index out of range");
    Exponent e(dim, 0);
    e[k] = 1;
    return monomial(std::move(e), 1);
}

Polynomial Polynomial::monomial(Exponent exponent, const Rational& c) {
    Polynomial p(exponent.size());
    p.add_term(exponent, c);
    return p;
}

bool Polynomial::is_constant() const {
    return terms_.empty() || (terms_.size() == 1 && total_degree(terms_.begin()->first) == 0);
}

unsigned Polynomial::degree() const {
    // graded-lex order puts the highest total degree last
    return terms_.empty() ? 0 : total_degree(terms_.rbegin()->first);
}

Rational Polynomial::coefficient(const Exponent& e) const {
    auto it = terms_.find(e);
    return it == terms_.end() ? Rational(0) : it->second;
}

Rational Polynomial::constant_term() const {
    return coefficient(Exponent(dim_, 0));
}

void Polynomial::add_term(const Exponent& e, const Rational& c) {
    if (e.size() != dim_) throw DimensionMismatch(dim_, e.size(), "Polynomial::add_term");
    if (c == 0) return;
    auto [it, inserted] = terms_.try_emplace(e, c);
    if (!inserted) {
        it->second += c;
        if (it->second == 0) terms_.erase(it);
    }
}

void Polynomial::require_same_dim(const Polynomial& other, const char* where) const {
    if (other.dim_ != dim_) throw DimensionMismatch(dim_, other.dim_, where);
}

Polynomial& Polynomial::operator+=(const Polynomial& other) {
    require_same_dim(other, "Polynomial::operator+");
    for (const auto& [e, c] : other.terms_) add_term(e, c);
    return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& other) {
    require_same_dim(other, "Polynomial::operator-");
    for (const auto& [e, c] : other.terms_) add_term(e, -c);
    return *this;
}

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    a.require_same_dim(b, "Polynomial::operator*");
    Polynomial out(a.dim_);
    Exponent e(a.dim_);
    Rational c;
    for (const auto& [ea, ca] : a.terms_) {
        for (const auto& [eb, cb] : b.terms_) {
            for (std::size_t j = 0; j < e.size(); ++j) e[j] = ea[j] + eb[j];
            c = ca * cb;
            out.add_term(e, c);
        }
    }
    return out;
}

Polynomial& Polynomial::operator*=(const Polynomial& other) {
    *this = *this * other;
    return *this;
}

Polynomial& Polynomial::operator*=(const Rational& c) {
    if (c == 0) {
        terms_.clear();
        return *this;
    }
    for (auto& [e, coef] : terms_) coef *= c;
    return *this;
}

Polynomial Polynomial::operator-() const {
    Polynomial out = *this;
    for (auto& [e, c] : out.terms_) c = -c;
    return out;
}

bool Polynomial::operator==(const Polynomial& other) const {
    return dim_ == other.dim_ && terms_ == other.terms_;
}

Polynomial Polynomial::derivative(std::size_t k) const {
    if (k >= dim_) throw InvalidArgument("derivative index out of range");
    Polynomial out(dim_);
    for (const auto& [e, c] : terms_) {
        if (e[k] == 0) continue;
        Exponent de = e;
        --de[k];
        out.add_term(de, c * e[k]);
    }
    return out;
}

Polynomial Polynomial::pow(unsigned n) const {
    Polynomial result = constant(dim_, 1);
    Polynomial base = *this;
    while (n > 0) {
        if (n & 1u) result *= base;
        n >>= 1;
        if (n > 0) base *= base;
    }
    return result;
}

Rational Polynomial::evaluate(std::span<const Rational> point) const {
    if (point.size() != dim_) throw DimensionMismatch(dim_, point.size(), "Polynomial::evaluate");
    Rational sum = 0;
    Rational term;
    for (const auto& [e, c] : terms_) {
        term = c;
        for (std::size_t j = 0; j < dim_; ++j) {
            for (std::uint32_t p = 0; p < e[j]; ++p) term *= point[j];
        }
        sum += term;
    }
    return sum;
}

double Polynomial::evaluate(std::span<const double> point) const {
    if (point.size() != dim_) throw DimensionMismatch(dim_, point.size(), "Polynomial::evaluate");
    double sum = 0.0;
    for (const auto& [e, c] : terms_) {
        double term = c.get_d();
        for (std::size_t j = 0; j < dim_; ++j) {
            for (std::uint32_t p = 0; p < e[j]; ++p) term *= point[j];
        }
        sum += term;
    }
    return sum;
}

Polynomial Polynomial::compose(std::span<const Polynomial> subs, unsigned max_degree) const {
    if (subs.size() != dim_) throw DimensionMismatch(dim_, subs.size(), "Polynomial::compose");
    const std::size_t out_dim = subs.front().dim();
    for (const auto& s : subs) {
        if (s.dim() != out_dim) throw DimensionMismatch(out_dim, s.dim(), "Polynomial::compose");
    }

    // powers[j][p] = subs[j]^p, filled on demand
    std::vector<std::vector<Polynomial>> powers(dim_);
    auto power = [&](std::size_t j, std::uint32_t p) -> const Polynomial& {
        auto& row = powers[j];
        if (row.empty()) row.push_back(constant(out_dim, 1));
        while (row.size() <= p) row.push_back(row.back() * subs[j]);
        return row[p];
    };

    Polynomial out(out_dim);
    for (const auto& [e, c] : terms_) {
        Polynomial term = constant(out_dim, c);
        for (std::size_t j = 0; j < dim_; ++j) {
            if (e[j] > 0) term *= power(j, e[j]);
        }
        out += term;
    }
    if (out.degree() > max_degree) throw DegreeOverflow(out.degree(), max_degree);
    return out;
}

std::size_t Polynomial::hash() const {
    std::size_t h = std::hash<std::size_t>{}(dim_);
    auto mix = [&h](std::size_t v) { h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2); };
    for (const auto& [e, c] : terms_) {
        for (auto x : e) mix(x);
        mix(std::hash<std::string>{}(c.get_str()));
    }
    return h;
}

HormanderFailure::HormanderFailure(std::vector<std::size_t> flag, std::size_t dim)
    : Error([&] {
          std::string msg = "bracket-generating condition fails: flag (";
          for (std::size_t i = 0; i < flag.size(); ++i) {
              if (i) msg += ",";
              msg += std::to_string(flag[i]);
          }
          return msg + ") never reaches dimension " + std::to_string(dim);
      }()),
      flag_(std::move(flag)), dim_(dim) {}

}  // namespace srl
