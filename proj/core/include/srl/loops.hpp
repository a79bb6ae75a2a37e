#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "srl/nilpotent.hpp"
#include "srl/sde_model.hpp"
#include "srl/simulate.hpp"
#include "srl/stats.hpp"

namespace srl {

/// Loops obtained by rejection: paths whose rescaled endpoint
/// delta_eps^{-1}(theta(x_1) - theta(x)) lies in the ball of the given radius.
struct LoopEnsemble {
    std::string label;
    double eps = 1.0;
    double radius = 0.0;
    double acceptance_rate = 0.0;
    std::size_t dim = 0;
    std::vector<double> times;
    std::vector<double> rescaled;      // n x times x d
    std::vector<double> chart_coords;  // n x times x d, theta(x_t) - theta(x)
    std::vector<double> terminal;      // n x d, rescaled
    SimConfig config;

    std::size_t size() const { return times.empty() ? terminal.size() / std::max<std::size_t>(dim, 1)
                                                    : rescaled.size() / (times.size() * dim); }
    std::size_t time_index(double t) const;
    /// Rescaled coordinate k at times[t] across all loops.
    std::vector<double> marginal(std::size_t t, std::size_t k) const;
    /// Per loop, all coordinates at the given time indices, concatenated.
    std::vector<double> joint(std::span<const std::size_t> time_indices) const;
};

/// Errors when the acceptance rate falls below 1e-4 or fewer than
/// min_accepted loops are found.
LoopEnsemble sample_loops(const SdeModel& model, const SimConfig& config, double radius,
                          std::span<const double> times, std::size_t min_accepted = 1);
/// Loops of the limiting system (simulated at eps = 1, no rescaling).
LoopEnsemble sample_loops(const NilpotentSystem& sys, const SimConfig& config, double radius,
                          std::span<const double> times, std::size_t min_accepted = 1);

struct DensityEstimate {
    double value = 0.0;
    double radius = 0.0;
    double std_error = 0.0;
    std::size_t hits = 0;
    std::size_t n = 0;
    bool usable = false;
    std::string kind = "ball-fraction";

    double lower_bound(double z) const { return value - z * std_error; }
};

double ball_volume(std::size_t dim, double radius);

/// (#{|p| <= r} / n) / (scale * vol(B_r)) with binomial standard error.
/// Needs at least 1000 points.
DensityEstimate density_at_zero(std::span<const double> points, std::size_t dim, double radius,
                                double volume_scale = 1.0);

struct HeatSlopeReport {
    std::vector<double> eps;
    std::vector<DensityEstimate> rescaled;  // q^(eps, 0, 0)
    std::vector<double> p_hat;              // q^ / eps^{Q/2}
    std::vector<double> p_se;
    int homogeneous_dimension = 0;
    LinearFit fit;  // log p^ against log(1/eps)
    double expected() const { return 0.5 * homogeneous_dimension; }
    double ci_low(double z = 1.96) const { return fit.slope - z * fit.slope_se; }
    double ci_high(double z = 1.96) const { return fit.slope + z * fit.slope_se; }
    /// 99% lower confidence bound of q^ at the smallest eps.
    double q_lower99 = 0.0;
};

/// p^(eps, 0, 0) from the fraction of endpoints in the dilated ball
/// delta_eps(B_r), whose volume is eps^{Q/2} vol(B_r). Needs at least three
/// eps values spanning a decade.
HeatSlopeReport heat_kernel_slope(const SdeModel& model, std::span<const double> eps_grid, const SimConfig& config,
                                  double radius = 0.5);

struct KsEntry {
    double time = 0.0;
    std::size_t coordinate = 0;
    KsResult ks;
};

struct LoopComparison {
    std::vector<KsEntry> ks;
    EnergyTest energy;
    double max_ks() const;
};

/// KS per time and coordinate, plus the energy test on the joint vectors at
/// the given times with every column divided by its pooled standard deviation.
LoopComparison compare_loop_laws(const LoopEnsemble& a, const LoopEnsemble& b, std::span<const double> times,
                                 std::size_t permutations = 200, std::uint64_t seed = 1);

struct TightnessRow {
    double eps = 0.0;
    double lag = 0.0;
    double moment = 0.0;  // E|x_{t+h} - x_t|^4 averaged over grid pairs
    double std_error = 0.0;
};

struct TightnessReport {
    std::vector<TightnessRow> rows;
    std::vector<double> exponents;  // per ensemble; +inf for constant paths
    std::vector<double> prefactors;
    double min_exponent = 0.0;
    double sup_prefactor = 0.0;
    bool passed(double threshold = 1.7) const { return min_exponent >= threshold; }
};

/// Fourth moments of increments on the ensembles' uniform time grids.
TightnessReport tightness_moment_check(std::span<const LoopEnsemble* const> ensembles, std::span<const double> lags);

struct CollapseCoordinate {
    std::size_t coordinate = 0;
    int weight = 1;
    std::vector<double> variance;  // per eps, of eps^{-1/2}(theta(x_1/2) - theta(x))
    std::vector<double> variance_se;
    double exponent = 0.0;  // fitted d log var / d log eps
    bool passed = false;
};

struct CollapseReport {
    std::vector<double> eps;
    std::size_t d1 = 0;
    bool vacuous = false;
    std::vector<CollapseCoordinate> coordinates;
    bool passed() const;
};

CollapseReport sqrt_eps_collapse(const SdeModel& model, std::size_t d1, std::span<const double> eps_grid,
                                 const SimConfig& config, double radius = 0.3, double tolerance = 0.3);

struct BridgeOracleOptions {
    std::size_t steps = 512;
    std::uint64_t seed = 1;
    bool unit_weights = false;
    std::size_t permutations = 200;
    std::size_t bootstrap = 200;
    /// Coordinate-1 midpoints of conditioned limit loops, for the cross-check.
    std::vector<double> loop_midpoints;
};

struct BridgeOracleReport {
    std::size_t n = 0;
    double ess = 0.0;
    KsResult weighted_vs_plain;
    double permutation_p = 1.0;
    double mean = 0.0;
    double variance = 0.0;
    double excess_kurtosis = 0.0;
    double kurtosis_ci_low = 0.0;
    double kurtosis_ci_high = 0.0;
    std::optional<KsResult> vs_loops;
    std::vector<double> midpoints;  // weighted sample at t = 1/2
    std::vector<double> weights;    // normalised
};

/// Brownian bridges weighted by (int omega^4)^{-1/2}, compared at t = 1/2
/// with an independent plain bridge sample. Needs n >= 1e4 and an
/// effective sample size of at least 100.
BridgeOracleReport reweighted_bridge_oracle(std::size_t n, const BridgeOracleOptions& options = {});

void write_report_csv(std::ostream& out, const HeatSlopeReport& r);
void write_report_csv(std::ostream& out, const LoopComparison& r, double eps);
void write_report_csv(std::ostream& out, const TightnessReport& r);
void write_report_csv(std::ostream& out, const CollapseReport& r);
void write_report_csv(std::ostream& out, const BridgeOracleReport& r);
/// Plot-ready rows eps,time,coordinate,statistic,value for mean and variance.
void write_long_format(std::ostream& out, const LoopEnsemble& e);

}  // namespace srl
