#include "srl/nilpotent.hpp"

#include <random>

#include "srl/errors.hpp"
#include "srl/linalg.hpp"
#include "srl/poly_text.hpp"

namespace srl {

NilpotentSystem nilpotentize(std::span<const PolyVectorField> generators, const AdaptedChart& chart,
                             unsigned max_degree) {
    const Weights& w = chart.structure().weights();
    std::vector<PolyVectorField> fields;
    for (const auto& g : generators) fields.push_back(graded_truncate(pushforward(chart.theta(), g, max_degree), 1, w));
    PolyVectorField drift = ito_drift_correction(PolyVectorField::zero(chart.structure().dim()), fields);
    return NilpotentSystem{std::move(fields), std::move(drift), chart.structure(), chart.theta()};
}

std::optional<Rational> exact_sqrt(const Rational& q) {
    if (q < 0) return std::nullopt;
    mpz_class num = q.get_num();
    mpz_class den = q.get_den();
    if (!mpz_perfect_square_p(num.get_mpz_t()) || !mpz_perfect_square_p(den.get_mpz_t())) return std::nullopt;
    mpz_class rn;
    mpz_class rd;
    mpz_sqrt(rn.get_mpz_t(), num.get_mpz_t());
    mpz_sqrt(rd.get_mpz_t(), den.get_mpz_t());
    Rational r(rn, rd);
    r.canonicalize();
    return r;
}

namespace {

Rational rational_pow(const Rational& base, int p) {
    Rational out = 1;
    const Rational b = p >= 0 ? base : Rational(1 / base);
    for (int i = 0; i < (p >= 0 ? p : -p); ++i) out *= b;
    return out;
}

}  // namespace

PolyVectorField rescale_field(const PolyVectorField& y, const Rational& sqrt_eps, const Weights& weights) {
    const std::size_t d = y.dim();
    if (weights.size() != d) throw DimensionMismatch(d, weights.size(), "rescale_field");
    std::vector<Polynomial> dil;
    for (std::size_t j = 0; j < d; ++j) dil.push_back(rational_pow(sqrt_eps, weights[j]) * Polynomial::variable(d, j));
    std::vector<Polynomial> comps;
    for (std::size_t k = 0; k < d; ++k) {
        comps.push_back(y[k].compose(dil, std::max(y[k].degree(), 1u)) * rational_pow(sqrt_eps, 1 - weights[k]));
    }
    return PolyVectorField(std::move(comps));
}

std::vector<FieldCheck> check_homogeneity(const NilpotentSystem& sys, std::size_t sample_points, std::uint64_t seed) {
    const Weights& w = sys.weights();
    const std::size_t d = sys.dim();
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> num(-9, 9);
    std::uniform_int_distribution<int> den(1, 5);
    std::vector<RationalVector> points;
    for (std::size_t i = 0; i < sample_points; ++i) {
        RationalVector p;
        for (std::size_t k = 0; k < d; ++k) {
            Rational q(num(rng), den(rng));
            q.canonicalize();
            p.push_back(q);
        }
        points.push_back(std::move(p));
    }
    const Rational roots[] = {Rational(1, 2), Rational(1, 3)};  // eps = 1/4, 1/9

    std::vector<FieldCheck> out;
    for (std::size_t i = 0; i < sys.fields.size(); ++i) {
        const auto& f = sys.fields[i];
        FieldCheck check{i, true, "weight 1"};
        for (std::size_t k = 0; k < d && check.passed; ++k) {
            for (const auto& [e, c] : f[k].terms()) {
                const int mw = monomial_weight(e, k, w);
                if (mw != 1) {
                    check.passed = false;
                    check.detail = "component " + std::to_string(k + 1) + " has a term of weight " + std::to_string(mw);
                    break;
                }
            }
        }
        for (const auto& s : roots) {
            if (!check.passed) break;
            for (const auto& p : points) {
                // (delta^{-1})_* X (p) = delta^{-1}(X(delta p)) against s^{-1} X(p)
                const RationalVector lhs_inner = f.evaluate(dilate_exact(p, s, w));
                const RationalVector rhs = f.evaluate(p);
                for (std::size_t k = 0; k < d; ++k) {
                    const Rational lhs = lhs_inner[k] / rational_pow(s, w[k]);
                    if (lhs != rhs[k] / s) {
                        check.passed = false;
                        check.detail = "dilation identity fails at eps = " + to_string(Rational(s * s));
                        break;
                    }
                }
                if (!check.passed) break;
            }
        }
        out.push_back(std::move(check));
    }
    return out;
}

std::vector<FieldCheck> check_cascade(const NilpotentSystem& sys) {
    const Weights& w = sys.weights();
    const std::size_t d = sys.dim();
    std::vector<FieldCheck> out;
    for (std::size_t i = 0; i < sys.fields.size(); ++i) {
        FieldCheck check{i, true, "cascade"};
        for (std::size_t k = 0; k < d && check.passed; ++k) {
            for (const auto& [e, c] : sys.fields[i][k].terms()) {
                unsigned next_lower = 0;
                for (std::size_t j = 0; j < d; ++j) {
                    if (e[j] == 0) continue;
                    if (w[j] >= w[k]) {
                        check.passed = false;
                        check.detail = "component " + std::to_string(k + 1) + " depends on y" + std::to_string(j + 1) +
                                       " of weight >= " + std::to_string(w[k]);
                    }
                    if (w[j] == w[k] - 1) next_lower += e[j];
                }
                if (next_lower > 1) {
                    check.passed = false;
                    check.detail = "component " + std::to_string(k + 1) +
                                   " is not affine in the weight " + std::to_string(w[k] - 1) + " variables";
                }
                if (!check.passed) break;
            }
        }
        out.push_back(std::move(check));
    }
    return out;
}

ConvergenceReport check_convergence_to_nilpotent(std::span<const PolyVectorField> generators,
                                                 const AdaptedChart& chart, std::span<const Rational> eps_grid,
                                                 unsigned max_degree) {
    const Weights& w = chart.structure().weights();
    const std::size_t d = chart.structure().dim();
    ConvergenceReport report;
    report.eps_grid.assign(eps_grid.begin(), eps_grid.end());
    std::vector<Rational> roots;
    for (const auto& e : eps_grid) {
        auto r = exact_sqrt(e);
        if (!r || *r == 0) throw InvalidArgument("eps values must be squares of positive rationals");
        roots.push_back(*r);
    }
    report.passed = true;
    for (std::size_t i = 0; i < generators.size(); ++i) {
        const PolyVectorField pushed = pushforward(chart.theta(), generators[i], max_degree);
        const PolyVectorField tilde = graded_truncate(pushed, 1, w);
        const PolyVectorField residual_one = pushed - tilde;
        std::vector<PolyVectorField> residuals;
        std::vector<Rational> gaps;
        for (const auto& s : roots) {
            PolyVectorField r = rescale_field(pushed, s, w) - tilde;
            Rational gap = 0;
            for (std::size_t k = 0; k < d; ++k) {
                for (const auto& [e, c] : r[k].terms()) gap = std::max(gap, Rational(abs(c)));
            }
            gaps.push_back(gap);
            residuals.push_back(std::move(r));
        }
        report.max_gap.push_back(std::move(gaps));

        for (std::size_t k = 0; k < d; ++k) {
            for (const auto& [e, c1] : residual_one[k].terms()) {
                ConvergenceTerm term{i, k, e, c1, std::nullopt};
                std::optional<int> power;
                bool consistent = true;
                for (std::size_t g = 0; g < roots.size(); ++g) {
                    if (roots[g] == 1) continue;
                    const Rational ratio = residuals[g][k].coefficient(e) / c1;
                    std::optional<int> found;
                    for (int p = -32; p <= 32; ++p) {
                        if (rational_pow(roots[g], p) == ratio) {
                            found = p;
                            break;
                        }
                    }
                    if (!found || (power && *power != *found)) {
                        consistent = false;
                        break;
                    }
                    power = found;
                }
                if (consistent) term.eps_power = power;
                if (!term.eps_power || *term.eps_power < 1) report.passed = false;
                report.terms.push_back(std::move(term));
            }
        }
    }
    return report;
}

std::vector<FlagLevel> check_bracket_flag(const NilpotentSystem& sys) {
    const std::size_t d = sys.dim();
    const std::size_t step = sys.structure.step();
    const BracketTable table = build_bracket_table(sys.fields, step);
    const RationalVector origin(d, Rational(0));
    std::vector<FlagLevel> out;
    EchelonBasis basis(d);
    bool aligned = true;
    for (std::size_t n = 1; n <= step; ++n) {
        const std::size_t dn = sys.structure.flag_dim(n);
        for (const auto& e : table.entries) {
            if (e.depth() != n) continue;
            const RationalVector v = e.field.evaluate(origin);
            for (std::size_t k = dn; k < d; ++k) {
                if (v[k] != 0) aligned = false;
            }
            basis.add(v);
        }
        out.push_back({n, basis.rank(), dn, aligned});
    }
    return out;
}

std::vector<HormanderPointCheck> check_strong_hormander_everywhere(const NilpotentSystem& sys,
                                                                   std::span<const std::vector<double>> points,
                                                                   double rel_tol) {
    const std::size_t d = sys.dim();
    const BracketTable table = build_bracket_table(sys.fields, sys.structure.step());
    std::vector<HormanderPointCheck> out;
    for (const auto& p : points) {
        if (p.size() != d) throw DimensionMismatch(d, p.size(), "check_strong_hormander_everywhere");
        Eigen::MatrixXd m(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(table.entries.size()));
        for (std::size_t c = 0; c < table.entries.size(); ++c) {
            const auto v = table.entries[c].field.evaluate(std::span<const double>(p));
            for (std::size_t k = 0; k < d; ++k) m(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(c)) = v[k];
        }
        const std::size_t r = numeric_rank(m, rel_tol);
        out.push_back({p, r, r == d});
    }
    return out;
}

}  // namespace srl
