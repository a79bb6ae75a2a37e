#include "srl/grading.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

#include "srl/errors.hpp"
#include "srl/linalg.hpp"

namespace srl {

std::string BracketEntry::label() const {
    std::string out;
    for (std::size_t i = 0; i < word.size(); ++i) {
        const std::string x = "X" + std::to_string(word[i] + 1);
        if (i + 1 < word.size()) {
            out += "[" + x + ",";
        } else {
            out += x;
        }
    }
    out.append(word.size() - 1, ']');
    return out;
}

std::vector<const BracketEntry*> BracketTable::up_to(std::size_t n) const {
    std::vector<const BracketEntry*> out;
    for (const auto& e : entries) {
        if (e.depth() <= n) out.push_back(&e);
    }
    return out;
}

BracketTable build_bracket_table(std::span<const PolyVectorField> generators, std::size_t max_depth) {
    if (generators.empty()) throw InvalidArgument("need at least one generator");
    if (max_depth < 1) throw InvalidArgument("max_depth must be >= 1");
    BracketTable table;
    table.max_depth = max_depth;
    std::vector<BracketEntry> previous;
    for (std::size_t i = 0; i < generators.size(); ++i) {
        previous.push_back({{i}, generators[i]});
    }
    // depth-1 entries are kept even when zero so indices match generators
    table.entries = previous;
    for (std::size_t depth = 2; depth <= max_depth; ++depth) {
        std::vector<BracketEntry> current;
        for (std::size_t i = 0; i < generators.size(); ++i) {
            for (const auto& inner : previous) {
                if (inner.field.is_zero()) continue;
                PolyVectorField b = lie_bracket(generators[i], inner.field);
                if (b.is_zero()) continue;
                std::vector<std::size_t> word{i};
                word.insert(word.end(), inner.word.begin(), inner.word.end());
                current.push_back({std::move(word), std::move(b)});
            }
        }
        table.entries.insert(table.entries.end(), current.begin(), current.end());
        previous = std::move(current);
        if (previous.empty()) break;
    }
    return table;
}

GradedStructure::GradedStructure(std::vector<std::size_t> flag, RationalVector base_point)
    : flag_(std::move(flag)), base_point_(std::move(base_point)) {
    if (flag_.empty()) throw InvalidArgument("empty flag");
    for (std::size_t n = 1; n < flag_.size(); ++n) {
        if (flag_[n] < flag_[n - 1]) throw InvalidArgument("flag dimensions must be non-decreasing");
    }
    if (flag_.size() >= 2 && flag_[flag_.size() - 2] == flag_.back()) {
        throw InvalidArgument("flag must reach d exactly at the step");
    }
    const std::size_t d = flag_.back();
    if (base_point_.size() != d) throw DimensionMismatch(d, base_point_.size(), "GradedStructure");
    weights_.resize(d);
    for (std::size_t k = 1; k <= d; ++k) {
        std::size_t l = 1;
        while (flag_[l - 1] < k) ++l;
        weights_[k - 1] = static_cast<int>(l);
    }
}

std::size_t GradedStructure::flag_dim(std::size_t n) const {
    if (n == 0) return 0;
    if (n > flag_.size()) return flag_.back();
    return flag_[n - 1];
}

int GradedStructure::homogeneous_dimension() const {
    return std::accumulate(weights_.begin(), weights_.end(), 0);
}

GradingResult build_graded_structure(std::span<const PolyVectorField> generators,
                                     std::span<const Rational> point, std::size_t max_depth) {
    if (generators.empty()) throw InvalidArgument("need at least one generator");
    const std::size_t d = generators.front().dim();
    for (const auto& g : generators) {
        if (g.dim() != d) throw DimensionMismatch(d, g.dim(), "build_graded_structure");
    }
    if (point.size() != d) throw DimensionMismatch(d, point.size(), "build_graded_structure");
    if (max_depth < 1) throw InvalidArgument("max_depth must be >= 1");

    BracketTable table;
    table.max_depth = max_depth;
    EchelonBasis basis(d);
    std::vector<std::size_t> flag;
    std::vector<BracketEntry> previous;
    for (std::size_t depth = 1; depth <= max_depth; ++depth) {
        std::vector<BracketEntry> current;
        if (depth == 1) {
            for (std::size_t i = 0; i < generators.size(); ++i) current.push_back({{i}, generators[i]});
        } else {
            for (std::size_t i = 0; i < generators.size(); ++i) {
                for (const auto& inner : previous) {
                    if (inner.field.is_zero()) continue;
                    PolyVectorField b = lie_bracket(generators[i], inner.field);
                    if (b.is_zero()) continue;
                    std::vector<std::size_t> word{i};
                    word.insert(word.end(), inner.word.begin(), inner.word.end());
                    current.push_back({std::move(word), std::move(b)});
                }
            }
        }
        for (const auto& e : current) basis.add(e.field.evaluate(point));
        table.entries.insert(table.entries.end(), current.begin(), current.end());
        flag.push_back(basis.rank());
        if (basis.rank() == d) {
            table.max_depth = depth;
            return {GradedStructure(std::move(flag), RationalVector(point.begin(), point.end())), std::move(table)};
        }
        previous = std::move(current);
    }
    throw HormanderFailure(std::move(flag), d);
}

std::vector<double> dilate(std::span<const double> p, double eps, const Weights& weights) {
    if (!(eps > 0.0)) throw InvalidArgument("dilation parameter must be positive");
    if (p.size() != weights.size()) throw DimensionMismatch(weights.size(), p.size(), "dilate");
    std::vector<double> out(p.size());
    for (std::size_t k = 0; k < p.size(); ++k) out[k] = std::pow(eps, 0.5 * weights[k]) * p[k];
    return out;
}

std::vector<double> dilate_inverse(std::span<const double> p, double eps, const Weights& weights) {
    if (!(eps > 0.0)) throw InvalidArgument("dilation parameter must be positive");
    if (p.size() != weights.size()) throw DimensionMismatch(weights.size(), p.size(), "dilate_inverse");
    std::vector<double> out(p.size());
    for (std::size_t k = 0; k < p.size(); ++k) out[k] = std::pow(eps, -0.5 * weights[k]) * p[k];
    return out;
}

RationalVector dilate_exact(std::span<const Rational> p, const Rational& sqrt_eps, const Weights& weights) {
    if (sqrt_eps <= 0) throw InvalidArgument("dilation parameter must be positive");
    if (p.size() != weights.size()) throw DimensionMismatch(weights.size(), p.size(), "dilate_exact");
    RationalVector out(p.size());
    for (std::size_t k = 0; k < p.size(); ++k) {
        Rational f = 1;
        for (int i = 0; i < weights[k]; ++i) f *= sqrt_eps;
        out[k] = f * p[k];
    }
    return out;
}

DriftSpanReport check_drift_in_span(const PolyVectorField& x0, std::span<const PolyVectorField> generators,
                                    std::span<const Rational> base_point,
                                    std::span<const std::vector<double>> points, double rel_tol) {
    const std::size_t d = x0.dim();
    DriftSpanReport report;
    {
        std::vector<RationalVector> cols;
        for (const auto& g : generators) cols.push_back(g.evaluate(base_point));
        const std::size_t without = exact_rank(cols, d);
        cols.push_back(x0.evaluate(base_point));
        report.base_point_ok = exact_rank(cols, d) == without;
    }
    for (std::size_t idx = 0; idx < points.size(); ++idx) {
        const auto& p = points[idx];
        Eigen::MatrixXd m(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(generators.size() + 1));
        for (std::size_t i = 0; i < generators.size(); ++i) {
            const auto v = generators[i].evaluate(std::span<const double>(p));
            for (std::size_t k = 0; k < d; ++k) m(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(i)) = v[k];
        }
        const auto v0 = x0.evaluate(std::span<const double>(p));
        for (std::size_t k = 0; k < d; ++k) {
            m(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(generators.size())) = v0[k];
        }
        // one threshold for both ranks, relative to the largest singular value of [X_1..X_m X_0]
        const double top = Eigen::JacobiSVD<Eigen::MatrixXd>(m).singularValues()(0);
        auto rank_of = [&](const Eigen::MatrixXd& a) {
            std::size_t r = 0;
            if (top == 0.0) return r;
            const auto s = Eigen::JacobiSVD<Eigen::MatrixXd>(a).singularValues();
            for (Eigen::Index i = 0; i < s.size(); ++i) {
                if (s(i) > rel_tol * top) ++r;
            }
            return r;
        };
        const std::size_t without = rank_of(m.leftCols(static_cast<Eigen::Index>(generators.size())));
        const std::size_t with = rank_of(m);
        if (with != without) report.failing_points.push_back(idx);
    }
    return report;
}

std::string grading_report_csv(const GradedStructure& s) {
    std::ostringstream out;
    out << "n,d_n\n";
    for (std::size_t n = 1; n <= s.step(); ++n) out << n << ',' << s.flag_dim(n) << '\n';
    out << "weights";
    for (int w : s.weights()) out << ',' << w;
    out << '\n';
    out << "N," << s.step() << '\n';
    out << "Q," << s.homogeneous_dimension() << '\n';
    return out.str();
}

}  // namespace srl
