#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace srl {

double mean(std::span<const double> x);
/// Unbiased sample variance.
double variance(std::span<const double> x);
/// Linear interpolation between order statistics (type 7).
double quantile(std::vector<double> x, double q);

struct KsResult {
    double statistic = 0.0;
    double p_value = 1.0;
    double n_effective = 0.0;
};

/// Asymptotic Kolmogorov tail probability P(sqrt(n) D > lambda) with the
/// usual small-sample correction.
double kolmogorov_pvalue(double statistic, double n_effective);

KsResult ks_two_sample(std::span<const double> a, std::span<const double> b);
/// Weighted ECDFs; empty weights mean unit weights. The effective sizes are
/// Kish's (sum w)^2 / sum w^2.
KsResult ks_two_sample_weighted(std::span<const double> a, std::span<const double> wa, std::span<const double> b,
                                std::span<const double> wb);
/// One-sample KS against U(0, 1).
KsResult ks_uniform(std::span<const double> u);

double effective_sample_size(std::span<const double> w);

struct EnergyTest {
    double statistic = 0.0;
    double p_value = 1.0;
    std::size_t n_a = 0;
    std::size_t n_b = 0;
    std::size_t permutations = 0;
};

/// Two-sample energy distance 2E|A-B| - E|A-A'| - E|B-B'| (U-statistic form)
/// between row-major samples of dimension dim, with a label-permutation
/// p-value. Each sample is truncated to its first cap/2 rows.
EnergyTest energy_distance_test(std::span<const double> a, std::span<const double> b, std::size_t dim,
                                std::size_t permutations = 200, std::uint64_t seed = 1, std::size_t cap = 4000);

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_se = 0.0;
    std::size_t n = 0;
};

/// Ordinary least squares with the residual-based standard error.
LinearFit fit_line(std::span<const double> x, std::span<const double> y);
/// Weighted least squares with known standard deviations of y.
LinearFit fit_line_weighted(std::span<const double> x, std::span<const double> y, std::span<const double> sigma);

}  // namespace srl
