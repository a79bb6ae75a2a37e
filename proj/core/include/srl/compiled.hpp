#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "srl/polynomial.hpp"

namespace srl {

/// A list of polynomials flattened for fast double evaluation. Powers of each
/// variable are tabulated once per call and shared by all terms.
class CompiledPolys {
public:
    CompiledPolys() = default;
    explicit CompiledPolys(std::span<const Polynomial> polys);

    std::size_t dim() const { return dim_; }
    std::size_t size() const { return outputs_; }

    /// out[i] = polys[i](x). `powers` must hold at least scratch_size() doubles.
    void evaluate(const double* x, double* out, double* powers) const;
    std::size_t scratch_size() const { return dim_ * (max_exp_ + 1); }

    std::vector<double> operator()(std::span<const double> x) const;

private:
    struct Term {
        std::uint32_t output;
        std::uint32_t begin;
        std::uint32_t end;
        double coef;
    };
    std::size_t dim_ = 0;
    std::size_t outputs_ = 0;
    unsigned max_exp_ = 0;
    std::vector<Term> terms_;
    std::vector<std::uint32_t> factors_;  // var * (max_exp + 1) + exponent
};

}  // namespace srl
