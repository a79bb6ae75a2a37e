#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "srl/polynomial.hpp"

namespace srl {

/// Dense rational matrix stored as rows.
using RationalMatrix = std::vector<RationalVector>;

/// Incrementally maintained row-echelon basis of a subspace of Q^d.
/// Used to grow flag dimensions one vector at a time.
class EchelonBasis {
public:
    explicit EchelonBasis(std::size_t dim) : dim_(dim) {}

    /// Adds v if it is independent of the current span. Returns true when the
    /// rank increased.
    bool add(const RationalVector& v);
    /// True iff v lies in the current span.
    bool contains(const RationalVector& v) const;

    std::size_t rank() const { return rows_.size(); }
    std::size_t dim() const { return dim_; }

private:
    RationalVector reduce(const RationalVector& v) const;

    std::size_t dim_;
    std::vector<RationalVector> rows_;
    std::vector<std::size_t> pivots_;
};

std::size_t exact_rank(const std::vector<RationalVector>& vectors, std::size_t dim);

/// Some solution of A x = b (free variables set to zero), or nullopt.
std::optional<RationalVector> solve_exact(const RationalMatrix& a, const RationalVector& b);

std::optional<RationalMatrix> invert_exact(const RationalMatrix& a);

RationalVector mat_vec(const RationalMatrix& a, const RationalVector& v);

/// Numerical rank: number of singular values above rel_tol * sigma_max.
std::size_t numeric_rank(const Eigen::MatrixXd& columns, double rel_tol = 1e-9);

}  // namespace srl
