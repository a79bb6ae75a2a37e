#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "srl/nilpotent.hpp"
#include "srl/sde_model.hpp"

namespace srl {

struct SimConfig {
    double eps = 1.0;
    std::size_t steps = 2048;
    std::size_t paths = 1000;
    std::uint64_t master_seed = 1;
    std::size_t chunk_size = 256;
    std::size_t workers = 0;  // 0: hardware concurrency. Never affects results.

    void validate() const;
    std::size_t chunk_count() const { return (paths + chunk_size - 1) / chunk_size; }
};

struct RecordOptions {
    std::vector<double> times;  // snapped to the step grid
    bool jacobian = false;          // terminal v
    bool forward_jacobian = false;  // terminal u
    bool malliavin = false;         // c~_1 and lambda_min; needs weights
    bool v_trajectory = false;      // v at the recorded times
    double max_norm = 1e8;
    /// Optional filter on the terminal state; rejected paths are counted but not stored.
    std::function<bool(std::span<const double>)> keep;
};

/// Row-major per-path storage for the kept paths, in path order.
struct PathEnsemble {
    SimConfig config;
    std::size_t dim = 0;
    std::vector<double> times;
    std::size_t simulated = 0;
    std::size_t flagged = 0;
    std::vector<std::uint64_t> path_ids;
    std::vector<double> terminal;      // n x d
    std::vector<double> trajectories;  // n x times x d
    std::vector<double> v_path;        // n x times x d x d
    std::vector<double> v;             // n x d x d
    std::vector<double> u;             // n x d x d
    std::vector<double> malliavin;     // n x d x d
    std::vector<double> lambda_min;    // n
    double max_clip = 0.0;
    std::uint64_t seed = 0;
    std::size_t chunks = 0;

    std::size_t size() const { return path_ids.size(); }
    std::size_t valid() const { return simulated - flagged; }
    std::span<const double> terminal_of(std::size_t p) const { return {terminal.data() + p * dim, dim}; }
    std::span<const double> state_at(std::size_t p, std::size_t t) const {
        return {trajectories.data() + (p * times.size() + t) * dim, dim};
    }
    std::span<const double> matrix(const std::vector<double>& store, std::size_t p) const {
        return {store.data() + p * dim * dim, dim * dim};
    }
};

/// Euler-Maruyama for dx = sqrt(eps) sum X_i dB^i + eps X0 dt on [0, 1], with
/// optional Jacobian flows and rescaled Malliavin matrix. Paths with a
/// non-finite state or |x| > max_norm are flagged and dropped; more than 1%
/// flagged is a SimulationError.
PathEnsemble run_ensemble(const SdeModel& model, const SimConfig& config, const RecordOptions& options);

PathEnsemble simulate_paths(const SdeModel& model, const SimConfig& config, std::span<const double> times = {});
PathEnsemble simulate_with_jacobian(const SdeModel& model, const SimConfig& config, bool forward = false);
PathEnsemble malliavin_covariance(const SdeModel& model, const SimConfig& config);
/// The limiting nilpotent SDE; config.eps is ignored and set to 1.
PathEnsemble simulate_limit(const NilpotentSystem& sys, const SimConfig& config, const RecordOptions& options = {});

/// Long-format CSV: path_id,time,x1..xd, then v entries and lambda_min when present.
void write_ensemble_csv(std::ostream& out, const PathEnsemble& ensemble);

}  // namespace srl
