#include "srl/linalg.hpp"

#include "srl/errors.hpp"

namespace srl {

RationalVector EchelonBasis::reduce(const RationalVector& v) const {
    if (v.size() != dim_) throw DimensionMismatch(dim_, v.size(), "EchelonBasis");
    RationalVector r = v;
    for (std::size_t i = 0; i < rows_.size(); ++i) {
        const std::size_t p = pivots_[i];
        if (r[p] == 0) continue;
        const Rational f = r[p];  // rows are normalised to pivot 1
        for (std::size_t j = 0; j < dim_; ++j) {
            if (rows_[i][j] != 0) r[j] -= f * rows_[i][j];
        }
    }
    return r;
}

bool EchelonBasis::add(const RationalVector& v) {
    RationalVector r = reduce(v);
    std::size_t p = 0;
    while (p < dim_ && r[p] == 0) ++p;
    if (p == dim_) return false;
    const Rational inv = 1 / r[p];
    for (auto& x : r) x *= inv;
    // keep the basis fully reduced so reduce() can process rows in any order
    for (auto& row : rows_) {
        if (row[p] == 0) continue;
        const Rational f = row[p];
        for (std::size_t j = 0; j < dim_; ++j) row[j] -= f * r[j];
    }
    rows_.push_back(std::move(r));
    pivots_.push_back(p);
    return true;
}

bool EchelonBasis::contains(const RationalVector& v) const {
    const RationalVector r = reduce(v);
    for (const auto& x : r) {
        if (x != 0) return false;
    }
    return true;
}

std::size_t exact_rank(const std::vector<RationalVector>& vectors, std::size_t dim) {
    EchelonBasis basis(dim);
    for (const auto& v : vectors) basis.add(v);
    return basis.rank();
}

std::optional<RationalVector> solve_exact(const RationalMatrix& a, const RationalVector& b) {
    const std::size_t rows = a.size();
    if (b.size() != rows) throw DimensionMismatch(rows, b.size(), "solve_exact");
    const std::size_t cols = rows == 0 ? 0 : a.front().size();
    RationalMatrix m = a;
    for (std::size_t i = 0; i < rows; ++i) {
        if (m[i].size() != cols) throw DimensionMismatch(cols, m[i].size(), "solve_exact");
        m[i].push_back(b[i]);
    }
    std::vector<std::size_t> pivot_cols;
    std::size_t r = 0;
    for (std::size_t c = 0; c < cols && r < rows; ++c) {
        std::size_t piv = r;
        while (piv < rows && m[piv][c] == 0) ++piv;
        if (piv == rows) continue;
        std::swap(m[r], m[piv]);
        const Rational inv = 1 / m[r][c];
        for (auto& x : m[r]) x *= inv;
        for (std::size_t i = 0; i < rows; ++i) {
            if (i == r || m[i][c] == 0) continue;
            const Rational f = m[i][c];
            for (std::size_t j = c; j <= cols; ++j) m[i][j] -= f * m[r][j];
        }
        pivot_cols.push_back(c);
        ++r;
    }
    for (std::size_t i = r; i < rows; ++i) {
        if (m[i][cols] != 0) return std::nullopt;
    }
    RationalVector x(cols, Rational(0));
    for (std::size_t i = 0; i < r; ++i) x[pivot_cols[i]] = m[i][cols];
    return x;
}

std::optional<RationalMatrix> invert_exact(const RationalMatrix& a) {
    const std::size_t n = a.size();
    RationalMatrix m = a;
    for (std::size_t i = 0; i < n; ++i) {
        if (m[i].size() != n) throw DimensionMismatch(n, m[i].size(), "invert_exact");
        for (std::size_t j = 0; j < n; ++j) m[i].push_back(i == j ? 1 : 0);
    }
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t piv = c;
        while (piv < n && m[piv][c] == 0) ++piv;
        if (piv == n) return std::nullopt;
        std::swap(m[c], m[piv]);
        const Rational inv = 1 / m[c][c];
        for (auto& x : m[c]) x *= inv;
        for (std::size_t i = 0; i < n; ++i) {
            if (i == c || m[i][c] == 0) continue;
            const Rational f = m[i][c];
            for (std::size_t j = 0; j < 2 * n; ++j) m[i][j] -= f * m[c][j];
        }
    }
    RationalMatrix out(n);
    for (std::size_t i = 0; i < n; ++i) out[i].assign(m[i].begin() + static_cast<long>(n), m[i].end());
    return out;
}

RationalVector mat_vec(const RationalMatrix& a, const RationalVector& v) {
    RationalVector out(a.size(), Rational(0));
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i].size() != v.size()) throw DimensionMismatch(v.size(), a[i].size(), "mat_vec");
        for (std::size_t j = 0; j < v.size(); ++j) out[i] += a[i][j] * v[j];
    }
    return out;
}

std::size_t numeric_rank(const Eigen::MatrixXd& columns, double rel_tol) {
    if (columns.size() == 0) return 0;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(columns);
    const auto& s = svd.singularValues();
    if (s.size() == 0 || s(0) == 0.0) return 0;
    std::size_t rank = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i) {
        if (s(i) > rel_tol * s(0)) ++rank;
    }
    return rank;
}

}  // namespace srl
