#include "srl/compiled.hpp"

#include <algorithm>

#include "srl/errors.hpp"

namespace srl {

CompiledPolys::CompiledPolys(std::span<const Polynomial> polys) : outputs_(polys.size()) {
    if (polys.empty()) return;
    dim_ = polys.front().dim();
    for (const auto& p : polys) {
        if (p.dim() != dim_) throw DimensionMismatch(dim_, p.dim(), "CompiledPolys");
        for (const auto& [e, c] : p.terms()) {
            for (auto a : e) max_exp_ = std::max<unsigned>(max_exp_, a);
        }
    }
    const auto stride = static_cast<std::uint32_t>(max_exp_ + 1);
    for (std::size_t i = 0; i < polys.size(); ++i) {
        for (const auto& [e, c] : polys[i].terms()) {
            Term t{static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(factors_.size()), 0, c.get_d()};
            for (std::size_t j = 0; j < dim_; ++j) {
                if (e[j] > 0) factors_.push_back(static_cast<std::uint32_t>(j) * stride + e[j]);
            }
            t.end = static_cast<std::uint32_t>(factors_.size());
            terms_.push_back(t);
        }
    }
}

void CompiledPolys::evaluate(const double* x, double* out, double* powers) const {
    std::fill(out, out + outputs_, 0.0);
    const std::size_t stride = max_exp_ + 1;
    for (std::size_t j = 0; j < dim_; ++j) {
        double* row = powers + j * stride;
        row[0] = 1.0;
        for (std::size_t p = 1; p < stride; ++p) row[p] = row[p - 1] * x[j];
    }
    for (const auto& t : terms_) {
        double v = t.coef;
        for (std::uint32_t f = t.begin; f < t.end; ++f) v *= powers[factors_[f]];
        out[t.output] += v;
    }
}

std::vector<double> CompiledPolys::operator()(std::span<const double> x) const {
    if (x.size() != dim_) throw DimensionMismatch(dim_, x.size(), "CompiledPolys");
    std::vector<double> out(outputs_);
    std::vector<double> scratch(scratch_size());
    evaluate(x.data(), out.data(), scratch.data());
    return out;
}

}  // namespace srl
