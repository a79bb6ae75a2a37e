#include "srl/chart.hpp"

#include <algorithm>
#include <sstream>

#include "srl/errors.hpp"
#include "srl/linalg.hpp"
#include "srl/poly_text.hpp"

namespace srl {

std::string word_label(const Word& w) {
    std::string out;
    for (auto i : w) out += "X" + std::to_string(i + 1);
    return out;
}

std::vector<std::pair<Word, Polynomial>> operator_images(std::span<const PolyVectorField> generators,
                                                         const Polynomial& g, std::size_t max_length) {
    std::vector<std::pair<Word, Polynomial>> out;
    std::vector<std::pair<Word, Polynomial>> level{{Word{}, g}};
    for (std::size_t len = 1; len <= max_length; ++len) {
        std::vector<std::pair<Word, Polynomial>> next;
        for (std::size_t i = 0; i < generators.size(); ++i) {
            for (const auto& [w, p] : level) {
                Word nw{i};
                nw.insert(nw.end(), w.begin(), w.end());
                next.emplace_back(std::move(nw), generators[i].apply(p));
            }
        }
        std::sort(next.begin(), next.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
        out.insert(out.end(), next.begin(), next.end());
        level = std::move(next);
    }
    return out;
}

ChartValidation validate_adapted(const PolyMap& theta, std::span<const PolyVectorField> generators,
                                 const GradedStructure& structure) {
    const std::size_t d = structure.dim();
    if (theta.dim() != d) throw DimensionMismatch(d, theta.dim(), "validate_adapted");
    if (!theta.has_inverse() || !theta.inverse_is_exact()) {
        throw InvalidArgument("chart must carry an exact polynomial inverse");
    }
    const auto& x = structure.base_point();
    for (const auto& v : theta.evaluate(x)) {
        if (v != 0) throw InvalidArgument("chart does not send the base point to 0");
    }

    const std::size_t step = structure.step();
    const auto jac = theta.jacobian_at(x);

    // condition (i)
    const BracketTable table = build_bracket_table(generators, step);
    std::vector<AlignmentWitness> alignment;
    {
        EchelonBasis all(d);
        for (std::size_t n = 1; n <= step; ++n) {
            const std::size_t dn = structure.flag_dim(n);
            for (const auto& entry : table.entries) {
                if (entry.depth() != n) continue;
                const RationalVector image = mat_vec(jac, entry.field.evaluate(x));
                for (std::size_t k = dn; k < d; ++k) {
                    if (image[k] != 0) {
                        ChartViolation v;
                        v.condition = ChartViolation::Condition::alignment;
                        v.n = n;
                        v.k = k;
                        v.word = entry.word;
                        v.value = image[k];
                        v.message = "d theta(x) " + entry.label() + "(x) has nonzero coordinate " +
                                    std::to_string(k + 1) + " beyond d_" + std::to_string(n);
                        return v;
                    }
                }
                all.add(image);
            }
            if (all.rank() != dn) {
                ChartViolation v;
                v.condition = ChartViolation::Condition::alignment;
                v.n = n;
                v.message = "d theta(x) C_" + std::to_string(n) + "(x) has dimension " + std::to_string(all.rank()) +
                            ", expected " + std::to_string(dn);
                return v;
            }
            alignment.push_back({n, all.rank(), dn});
        }
    }

    // condition (ii): words of length n against coordinates k > d_n; shorter
    // words were already checked at their own level since d_n is non-decreasing
    std::vector<CertificateEntry> certificate;
    std::vector<std::vector<std::pair<Word, Polynomial>>> images(d);
    for (std::size_t k = 0; k < d; ++k) {
        const std::size_t max_len = static_cast<std::size_t>(structure.weights()[k] - 1);
        images[k] = operator_images(generators, theta.components()[k], max_len);
    }
    for (std::size_t n = 1; n < step; ++n) {
        for (std::size_t k = structure.flag_dim(n); k < d; ++k) {
            for (const auto& [word, poly] : images[k]) {
                if (word.size() != n) continue;
                Rational value = poly.evaluate(x);
                if (value != 0) {
                    ChartViolation v;
                    v.condition = ChartViolation::Condition::vanishing;
                    v.n = n;
                    v.k = k;
                    v.word = word;
                    v.value = value;
                    v.message = "(" + word_label(word) + " theta^" + std::to_string(k + 1) + ")(x) = " +
                                to_string(value) + " with " + std::to_string(k + 1) + " > d_" + std::to_string(n);
                    return v;
                }
                certificate.push_back({n, k, word, std::move(value)});
            }
        }
    }
    return AdaptedChart(theta, structure, std::move(alignment), std::move(certificate));
}

namespace {

// Exponents supported on `allowed` coordinates with total degree in
// [2, max_degree] and weighted degree <= max_weight.
void enumerate_corrections(const Weights& weights, const std::vector<std::size_t>& allowed, std::size_t pos,
                           Exponent& current, unsigned degree, int wdeg, unsigned max_degree, int max_weight,
                           std::vector<Exponent>& out) {
    if (pos == allowed.size()) {
        if (degree >= 2) out.push_back(current);
        return;
    }
    const std::size_t j = allowed[pos];
    for (unsigned p = 0;; ++p) {
        const unsigned nd = degree + p;
        const int nw = wdeg + static_cast<int>(p) * weights[j];
        if (nd > max_degree || nw > max_weight) break;
        current[j] = p;
        enumerate_corrections(weights, allowed, pos + 1, current, nd, nw, max_degree, max_weight, out);
    }
    current[j] = 0;
}

}  // namespace

AdaptedChart construct_adapted(std::span<const PolyVectorField> generators, const GradingResult& grading,
                               unsigned max_correction_degree) {
    const GradedStructure& structure = grading.structure;
    const std::size_t d = structure.dim();
    const Weights& w = structure.weights();
    const unsigned max_deg = max_correction_degree == 0 ? static_cast<unsigned>(structure.step())
                                                        : max_correction_degree;
    const auto& x = structure.base_point();

    // linear stage: greedy flag-compatible basis, ties broken by table order
    EchelonBasis basis(d);
    std::vector<RationalVector> chosen;
    for (const auto& entry : grading.table.entries) {
        RationalVector v = entry.field.evaluate(x);
        if (basis.add(v)) chosen.push_back(std::move(v));
        if (chosen.size() == d) break;
    }
    if (chosen.size() != d) throw Error("bracket table does not span R^d at the base point");
    RationalMatrix b(d, RationalVector(d));
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = 0; j < d; ++j) b[i][j] = chosen[j][i];
    }
    const RationalMatrix l = *invert_exact(b);

    std::vector<Polynomial> lin_fwd;
    std::vector<Polynomial> lin_inv;
    for (std::size_t i = 0; i < d; ++i) {
        Polynomial f(d);
        Polynomial g = Polynomial::constant(d, x[i]);
        for (std::size_t j = 0; j < d; ++j) {
            f += l[i][j] * (Polynomial::variable(d, j) - Polynomial::constant(d, x[j]));
            g += b[i][j] * Polynomial::variable(d, j);
        }
        lin_fwd.push_back(std::move(f));
        lin_inv.push_back(std::move(g));
    }
    const PolyMap affine(std::move(lin_fwd), std::move(lin_inv));

    std::vector<PolyVectorField> z_fields;
    for (const auto& g : generators) z_fields.push_back(pushforward(affine, g));

    // correction stage, one independent exact linear system per coordinate
    std::vector<Polynomial> corrections(d, Polynomial(d));
    const RationalVector origin(d, Rational(0));
    for (std::size_t k = 0; k < d; ++k) {
        if (w[k] <= 1) continue;
        const std::size_t max_len = static_cast<std::size_t>(w[k] - 1);
        std::vector<std::size_t> allowed;
        for (std::size_t j = 0; j < d; ++j) {
            if (w[j] < w[k]) allowed.push_back(j);
        }
        std::vector<Exponent> monomials;
        Exponent scratch(d, 0);
        enumerate_corrections(w, allowed, 0, scratch, 0, 0, max_deg, w[k] - 1, monomials);

        const auto target = operator_images(z_fields, Polynomial::variable(d, k), max_len);
        std::vector<std::vector<std::pair<Word, Polynomial>>> columns;
        for (const auto& e : monomials) {
            columns.push_back(operator_images(z_fields, Polynomial::monomial(e, 1), max_len));
        }
        RationalMatrix a(target.size(), RationalVector(monomials.size()));
        RationalVector rhs(target.size());
        for (std::size_t r = 0; r < target.size(); ++r) {
            rhs[r] = -target[r].second.evaluate(origin);
            for (std::size_t c = 0; c < monomials.size(); ++c) a[r][c] = columns[c][r].second.evaluate(origin);
        }
        const auto solution = solve_exact(a, rhs);
        if (!solution) {
            // report the shortest word length whose equations are inconsistent
            std::size_t bad_len = max_len;
            for (std::size_t len = 1; len <= max_len; ++len) {
                RationalMatrix sub;
                RationalVector sub_rhs;
                for (std::size_t r = 0; r < target.size(); ++r) {
                    if (target[r].first.size() <= len) {
                        sub.push_back(a[r]);
                        sub_rhs.push_back(rhs[r]);
                    }
                }
                if (!solve_exact(sub, sub_rhs)) {
                    bad_len = len;
                    break;
                }
            }
            throw ChartConstructionFailure(k, bad_len, max_deg);
        }
        for (std::size_t c = 0; c < monomials.size(); ++c) corrections[k].add_term(monomials[c], (*solution)[c]);
    }

    // T(z)^k = z^k + p_k(lower-weight z); invert in increasing weight order
    std::vector<Polynomial> t_fwd;
    for (std::size_t k = 0; k < d; ++k) t_fwd.push_back(Polynomial::variable(d, k) + corrections[k]);
    std::vector<std::size_t> order(d);
    for (std::size_t k = 0; k < d; ++k) order[k] = k;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return w[a] < w[b]; });
    std::vector<Polynomial> t_inv(d, Polynomial(d));
    for (std::size_t k = 0; k < d; ++k) t_inv[k] = Polynomial::variable(d, k);
    for (std::size_t k : order) {
        if (corrections[k].is_zero()) continue;
        // t_inv of lower-weight coordinates is final by now
        t_inv[k] = Polynomial::variable(d, k) - corrections[k].compose(t_inv, kDefaultMaxDegree);
    }
    const PolyMap triangular(std::move(t_fwd), std::move(t_inv));
    const PolyMap theta = triangular.after(affine);

    auto result = validate_adapted(theta, generators, structure);
    if (auto* violation = std::get_if<ChartViolation>(&result)) {
        throw Error("constructed chart failed validation: " + violation->message);
    }
    return std::get<AdaptedChart>(std::move(result));
}

std::string certificate_csv(const AdaptedChart& chart) {
    std::ostringstream out;
    out << "n,k,word,value\n";
    for (const auto& e : chart.certificate()) {
        out << e.n << ',' << e.k + 1 << ',' << word_label(e.word) << ',' << to_string(e.value) << '\n';
    }
    return out.str();
}

}  // namespace srl
