#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "srl/chart.hpp"
#include "srl/grading.hpp"
#include "srl/vector_field.hpp"

namespace srl {

/// Nilpotent approximations X~_i = (theta_* X_i)^{(1)} together with the
/// Ito drift 1/2 sum_i nabla_{X~_i} X~_i of the limiting diffusion.
struct NilpotentSystem {
    std::vector<PolyVectorField> fields;
    PolyVectorField drift_tilde;
    GradedStructure structure;
    PolyMap chart;

    std::size_t dim() const { return structure.dim(); }
    const Weights& weights() const { return structure.weights(); }
};

NilpotentSystem nilpotentize(std::span<const PolyVectorField> generators, const AdaptedChart& chart,
                             unsigned max_degree = kDefaultMaxDegree);

struct FieldCheck {
    std::size_t field = 0;
    bool passed = false;
    std::string detail;
};

/// Every monomial has weight exactly 1, and (delta_eps^{-1})_* X~ = eps^{-1/2} X~
/// holds exactly at random rational points for eps in {1/4, 1/9}.
std::vector<FieldCheck> check_homogeneity(const NilpotentSystem& sys, std::size_t sample_points = 20,
                                          std::uint64_t seed = 1);

/// Component k contains no variable of weight >= w_k and depends at most
/// affinely on variables of weight w_k - 1.
std::vector<FieldCheck> check_cascade(const NilpotentSystem& sys);

struct ConvergenceTerm {
    std::size_t field = 0;
    std::size_t component = 0;
    Exponent exponent;
    Rational coefficient;          // at eps = 1
    std::optional<int> eps_power;  // p with coefficient(eps) = eps^{p/2} coefficient(1)
};

struct ConvergenceReport {
    std::vector<Rational> eps_grid;
    /// max |residual coefficient| per field and per eps
    std::vector<std::vector<Rational>> max_gap;
    std::vector<ConvergenceTerm> terms;
    bool passed = false;  // every residual term scales with p >= 1
};

/// Residual sqrt(eps) (delta_eps^{-1})_*(theta_* X_i) - X~_i computed exactly.
/// eps values must be squares of rationals.
ConvergenceReport check_convergence_to_nilpotent(std::span<const PolyVectorField> generators,
                                                 const AdaptedChart& chart, std::span<const Rational> eps_grid,
                                                 unsigned max_degree = kDefaultMaxDegree);

struct FlagLevel {
    std::size_t n = 0;
    std::size_t rank = 0;
    std::size_t expected = 0;
    bool aligned = false;  // no bracket value of depth <= n leaves span{e_1..e_{d_n}}
    bool passed() const { return rank == expected && aligned; }
};

/// Bracket span of the X~ fields at 0 versus the flag of the original system.
std::vector<FlagLevel> check_bracket_flag(const NilpotentSystem& sys);

struct HormanderPointCheck {
    std::vector<double> point;
    std::size_t rank = 0;
    bool passed = false;
};

/// Numerical rank of the X~ brackets up to depth N at each point.
std::vector<HormanderPointCheck> check_strong_hormander_everywhere(const NilpotentSystem& sys,
                                                                   std::span<const std::vector<double>> points,
                                                                   double rel_tol = 1e-9);

/// sqrt(s^2)-rescaled pushforward s (delta^{-1})_* Y for eps = s^2.
PolyVectorField rescale_field(const PolyVectorField& y, const Rational& sqrt_eps, const Weights& weights);

std::optional<Rational> exact_sqrt(const Rational& q);

}  // namespace srl
