#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "srl/vector_field.hpp"

namespace srl {

/// Right-nested bracket [X_{i1}, [X_{i2}, ..., [X_{i(k-1)}, X_{ik}]...]] of
/// generator indices (zero-based). A word of length 1 is the generator itself.
struct BracketEntry {
    std::vector<std::size_t> word;
    PolyVectorField field;

    std::size_t depth() const { return word.size(); }
    std::string label() const;
};

struct BracketTable {
    std::vector<BracketEntry> entries;  // ordered by depth, then construction order
    std::size_t max_depth = 0;

    /// Entries of depth <= n.
    std::vector<const BracketEntry*> up_to(std::size_t n) const;
};

/// Builds all right-nested brackets of depth <= max_depth. Zero brackets are
/// kept out of the table since every bracket built on them vanishes.
BracketTable build_bracket_table(std::span<const PolyVectorField> generators, std::size_t max_depth);

class GradedStructure {
public:
    GradedStructure(std::vector<std::size_t> flag, RationalVector base_point);

    /// d_1, ..., d_N (non-decreasing, d_N = d).
    const std::vector<std::size_t>& flag() const { return flag_; }
    std::size_t flag_dim(std::size_t n) const;  // d_n, with d_0 = 0 and d_n = d for n > N
    std::size_t dim() const { return flag_.back(); }
    std::size_t step() const { return flag_.size(); }
    const Weights& weights() const { return weights_; }
    /// Homogeneous dimension sum_k w_k.
    int homogeneous_dimension() const;
    const RationalVector& base_point() const { return base_point_; }

private:
    std::vector<std::size_t> flag_;
    Weights weights_;
    RationalVector base_point_;
};

struct GradingResult {
    GradedStructure structure;
    BracketTable table;  // every bracket up to depth N
};

inline constexpr std::size_t kDefaultMaxDepth = 8;

/// Exact flag dimensions of the bracket filtration at point. Throws
/// HormanderFailure when the brackets up to max_depth do not span R^d.
GradingResult build_graded_structure(std::span<const PolyVectorField> generators,
                                     std::span<const Rational> point,
                                     std::size_t max_depth = kDefaultMaxDepth);

/// Anisotropic dilation y^k -> eps^{w_k/2} y^k.
std::vector<double> dilate(std::span<const double> p, double eps, const Weights& weights);
std::vector<double> dilate_inverse(std::span<const double> p, double eps, const Weights& weights);

/// Exact dilation with eps = s^2, so that eps^{w/2} = s^w stays rational.
RationalVector dilate_exact(std::span<const Rational> p, const Rational& sqrt_eps, const Weights& weights);

struct DriftSpanReport {
    bool base_point_ok = true;
    std::vector<std::size_t> failing_points;  // indices into the sample set
    bool ok() const { return base_point_ok && failing_points.empty(); }
};

/// Checks X0(p) in span{X_1(p), ..., X_m(p)}: exactly at the base point,
/// numerically (singular value threshold rel_tol) at each sample point.
DriftSpanReport check_drift_in_span(const PolyVectorField& x0, std::span<const PolyVectorField> generators,
                                    std::span<const Rational> base_point,
                                    std::span<const std::vector<double>> points, double rel_tol = 1e-9);

/// CSV block: `n,d_n` rows, then weights, N and Q.
std::string grading_report_csv(const GradedStructure& s);

}  // namespace srl
