#include "srl/loops.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>

#include "srl/errors.hpp"
#include "srl/rng.hpp"

namespace srl {

namespace {

double norm(std::span<const double> v) {
    double s = 0.0;
    for (double a : v) s += a * a;
    return std::sqrt(s);
}

LoopEnsemble collect_loops(const SdeModel& model, const SimConfig& config, double radius,
                           std::span<const double> times, std::size_t min_accepted) {
    if (!(radius > 0.0)) throw InvalidArgument("acceptance radius must be positive");
    if (!model.weights) throw InvalidArgument("loop sampling needs dilation weights on the model");
    const double eps = config.eps;
    RecordOptions options;
    options.times.assign(times.begin(), times.end());
    options.keep = [&model, eps, radius](std::span<const double> x) { return norm(model.rescale(x, eps)) <= radius; };
    const PathEnsemble ens = run_ensemble(model, config, options);

    LoopEnsemble out;
    out.label = model.label;
    out.eps = eps;
    out.radius = radius;
    out.dim = model.dim();
    out.times = ens.times;
    out.config = config;
    const std::size_t valid = ens.valid();
    out.acceptance_rate = valid == 0 ? 0.0 : static_cast<double>(ens.size()) / static_cast<double>(valid);
    if (out.acceptance_rate < 1e-4) {
        throw EstimationError("acceptance rate " + std::to_string(out.acceptance_rate) +
                              " is below 1e-4: increase the acceptance radius (now " + std::to_string(radius) +
                              ") or the path budget (now " + std::to_string(config.paths) + ")");
    }
    if (ens.size() < min_accepted) {
        throw EstimationError("only " + std::to_string(ens.size()) + " loops accepted, need " +
                              std::to_string(min_accepted) + ": raise the path budget or the acceptance radius");
    }
    const std::size_t d = out.dim;
    for (std::size_t p = 0; p < ens.size(); ++p) {
        for (std::size_t t = 0; t < ens.times.size(); ++t) {
            const auto x = ens.state_at(p, t);
            const auto r = model.rescale(x, eps);
            const auto c = model.chart_coordinates(x);
            out.rescaled.insert(out.rescaled.end(), r.begin(), r.end());
            out.chart_coords.insert(out.chart_coords.end(), c.begin(), c.end());
        }
        const auto r = model.rescale(ens.terminal_of(p), eps);
        out.terminal.insert(out.terminal.end(), r.begin(), r.begin() + static_cast<std::ptrdiff_t>(d));
    }
    return out;
}

}  // namespace

std::size_t LoopEnsemble::time_index(double t) const {
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (std::abs(times[i] - t) < 1e-9) return i;
    }
    throw InvalidArgument("time " + std::to_string(t) + " was not recorded");
}

std::vector<double> LoopEnsemble::marginal(std::size_t t, std::size_t k) const {
    std::vector<double> out;
    const std::size_t n = size();
    out.reserve(n);
    for (std::size_t p = 0; p < n; ++p) out.push_back(rescaled[(p * times.size() + t) * dim + k]);
    return out;
}

std::vector<double> LoopEnsemble::joint(std::span<const std::size_t> time_indices) const {
    std::vector<double> out;
    const std::size_t n = size();
    for (std::size_t p = 0; p < n; ++p) {
        for (auto t : time_indices) {
            const double* r = rescaled.data() + (p * times.size() + t) * dim;
            out.insert(out.end(), r, r + dim);
        }
    }
    return out;
}

LoopEnsemble sample_loops(const SdeModel& model, const SimConfig& config, double radius,
                          std::span<const double> times, std::size_t min_accepted) {
    return collect_loops(model, config, radius, times, min_accepted);
}

LoopEnsemble sample_loops(const NilpotentSystem& sys, const SimConfig& config, double radius,
                          std::span<const double> times, std::size_t min_accepted) {
    SimConfig c = config;
    c.eps = 1.0;
    return collect_loops(make_limit_model(sys), c, radius, times, min_accepted);
}

double ball_volume(std::size_t dim, double radius) {
    const double h = 0.5 * static_cast<double>(dim);
    return std::pow(std::numbers::pi, h) / std::tgamma(h + 1.0) * std::pow(radius, static_cast<double>(dim));
}

DensityEstimate density_at_zero(std::span<const double> points, std::size_t dim, double radius,
                                double volume_scale) {
    if (dim == 0 || points.size() % dim != 0) throw InvalidArgument("density_at_zero: bad shape");
    if (!(radius > 0.0)) throw InvalidArgument("density radius must be positive");
    const std::size_t n = points.size() / dim;
    if (n < 1000) throw EstimationError("density estimate needs at least 1000 samples, got " + std::to_string(n));
    DensityEstimate est;
    est.radius = radius;
    est.n = n;
    const double r2 = radius * radius;
    for (std::size_t p = 0; p < n; ++p) {
        double s = 0.0;
        for (std::size_t k = 0; k < dim; ++k) s += points[p * dim + k] * points[p * dim + k];
        if (s <= r2) ++est.hits;
    }
    const double vol = ball_volume(dim, radius) * volume_scale;
    const double frac = static_cast<double>(est.hits) / static_cast<double>(n);
    est.value = frac / vol;
    est.usable = est.hits > 0;
    est.std_error = est.usable ? std::sqrt(frac * (1.0 - frac) / static_cast<double>(n)) / vol
                               : std::numeric_limits<double>::infinity();
    return est;
}

HeatSlopeReport heat_kernel_slope(const SdeModel& model, std::span<const double> eps_grid, const SimConfig& config,
                                  double radius) {
    if (!model.weights) throw InvalidArgument("heat_kernel_slope needs dilation weights on the model");
    if (eps_grid.size() < 3) throw InvalidArgument("heat_kernel_slope needs at least three eps values");
    const auto [lo, hi] = std::minmax_element(eps_grid.begin(), eps_grid.end());
    if (*hi / *lo < 10.0 * (1.0 - 1e-9)) throw InvalidArgument("eps grid must span at least one decade");

    HeatSlopeReport report;
    for (int w : *model.weights) report.homogeneous_dimension += w;
    const double half_q = 0.5 * report.homogeneous_dimension;
    std::vector<double> xs;
    std::vector<double> ys;
    std::vector<double> sig;
    std::string unusable;
    const std::size_t d = model.dim();
    for (double eps : eps_grid) {
        SimConfig c = config;
        c.eps = eps;
        const PathEnsemble ens = simulate_paths(model, c);
        std::vector<double> pts;
        pts.reserve(ens.size() * d);
        for (std::size_t p = 0; p < ens.size(); ++p) {
            const auto r = model.rescale(ens.terminal_of(p), eps);
            pts.insert(pts.end(), r.begin(), r.end());
        }
        const DensityEstimate q = density_at_zero(pts, d, radius);
        const double scale = std::pow(eps, half_q);
        report.eps.push_back(eps);
        report.rescaled.push_back(q);
        report.p_hat.push_back(q.value / scale);
        report.p_se.push_back(q.std_error / scale);
        if (!q.usable) {
            unusable += (unusable.empty() ? "" : ", ") + std::to_string(eps);
            continue;
        }
        xs.push_back(std::log(1.0 / eps));
        ys.push_back(std::log(q.value / scale));
        sig.push_back(q.std_error / q.value);
    }
    if (!unusable.empty()) throw EstimationError("no endpoints in the density ball at eps = " + unusable);
    report.fit = fit_line_weighted(xs, ys, sig);
    const auto smallest = static_cast<std::size_t>(lo - eps_grid.begin());
    report.q_lower99 = report.rescaled[smallest].lower_bound(2.326);
    return report;
}

double LoopComparison::max_ks() const {
    double m = 0.0;
    for (const auto& e : ks) m = std::max(m, e.ks.statistic);
    return m;
}

LoopComparison compare_loop_laws(const LoopEnsemble& a, const LoopEnsemble& b, std::span<const double> times,
                                 std::size_t permutations, std::uint64_t seed) {
    if (a.dim != b.dim) throw DimensionMismatch(a.dim, b.dim, "compare_loop_laws");
    if (times.empty()) throw InvalidArgument("compare_loop_laws needs at least one time");
    LoopComparison out;
    std::vector<std::size_t> ia;
    std::vector<std::size_t> ib;
    for (double t : times) {
        ia.push_back(a.time_index(t));
        ib.push_back(b.time_index(t));
        for (std::size_t k = 0; k < a.dim; ++k) {
            out.ks.push_back({t, k, ks_two_sample(a.marginal(ia.back(), k), b.marginal(ib.back(), k))});
        }
    }
    // columns scaled by their pooled standard deviation, so small coordinates are not drowned out
    std::vector<double> ja = a.joint(ia);
    std::vector<double> jb = b.joint(ib);
    const std::size_t cols = a.dim * times.size();
    for (std::size_t c = 0; c < cols; ++c) {
        std::vector<double> pooled;
        for (std::size_t i = c; i < ja.size(); i += cols) pooled.push_back(ja[i]);
        for (std::size_t i = c; i < jb.size(); i += cols) pooled.push_back(jb[i]);
        const double sd = pooled.size() > 1 ? std::sqrt(variance(pooled)) : 0.0;
        if (!(sd > 0.0)) continue;
        for (std::size_t i = c; i < ja.size(); i += cols) ja[i] /= sd;
        for (std::size_t i = c; i < jb.size(); i += cols) jb[i] /= sd;
    }
    out.energy = energy_distance_test(ja, jb, cols, permutations, seed);
    return out;
}

TightnessReport tightness_moment_check(std::span<const LoopEnsemble* const> ensembles, std::span<const double> lags) {
    if (lags.size() < 2) throw InvalidArgument("tightness check needs at least two lags");
    TightnessReport report;
    report.min_exponent = std::numeric_limits<double>::infinity();
    for (const LoopEnsemble* e : ensembles) {
        if (e->times.size() < 2) throw InvalidArgument("tightness check needs a time grid");
        const double dt = e->times[1] - e->times[0];
        const std::size_t nt = e->times.size();
        const std::size_t n = e->size();
        const std::size_t d = e->dim;
        std::vector<double> lx;
        std::vector<double> ly;
        bool all_zero = true;
        for (double h : lags) {
            const auto s = static_cast<std::size_t>(std::llround(h / dt));
            if (s == 0 || s >= nt || std::abs(static_cast<double>(s) * dt - h) > 1e-9) {
                throw InvalidArgument("lag " + std::to_string(h) + " is not a multiple of the time grid");
            }
            std::vector<double> per_path(n, 0.0);
            for (std::size_t p = 0; p < n; ++p) {
                double acc = 0.0;
                for (std::size_t i = 0; i + s < nt; ++i) {
                    const double* x0 = e->rescaled.data() + (p * nt + i) * d;
                    const double* x1 = e->rescaled.data() + (p * nt + i + s) * d;
                    double q = 0.0;
                    for (std::size_t k = 0; k < d; ++k) q += (x1[k] - x0[k]) * (x1[k] - x0[k]);
                    acc += q * q;
                }
                per_path[p] = acc / static_cast<double>(nt - s);
            }
            TightnessRow row{e->eps, h, mean(per_path), n > 1 ? std::sqrt(variance(per_path) / static_cast<double>(n)) : 0.0};
            report.rows.push_back(row);
            if (row.moment > 0.0) {
                all_zero = false;
                lx.push_back(std::log(h));
                ly.push_back(std::log(row.moment));
            }
        }
        if (all_zero) {
            report.exponents.push_back(std::numeric_limits<double>::infinity());
            report.prefactors.push_back(0.0);
            continue;
        }
        const LinearFit f = fit_line(lx, ly);
        report.exponents.push_back(f.slope);
        report.prefactors.push_back(std::exp(f.intercept));
        report.min_exponent = std::min(report.min_exponent, f.slope);
        report.sup_prefactor = std::max(report.sup_prefactor, std::exp(f.intercept));
    }
    return report;
}

bool CollapseReport::passed() const {
    if (vacuous) return true;
    return std::all_of(coordinates.begin(), coordinates.end(), [](const auto& c) { return c.passed; });
}

CollapseReport sqrt_eps_collapse(const SdeModel& model, std::size_t d1, std::span<const double> eps_grid,
                                 const SimConfig& config, double radius, double tolerance) {
    if (!model.weights) throw InvalidArgument("sqrt_eps_collapse needs dilation weights on the model");
    const std::size_t d = model.dim();
    CollapseReport report;
    report.eps.assign(eps_grid.begin(), eps_grid.end());
    report.d1 = d1;
    if (d1 >= d) {
        report.vacuous = true;
        return report;
    }
    if (eps_grid.size() < 2) throw InvalidArgument("sqrt_eps_collapse needs at least two eps values");
    report.coordinates.resize(d);
    for (std::size_t k = 0; k < d; ++k) {
        report.coordinates[k].coordinate = k;
        report.coordinates[k].weight = (*model.weights)[k];
    }
    const double half[] = {0.5};
    for (double eps : eps_grid) {
        SimConfig c = config;
        c.eps = eps;
        const LoopEnsemble loops = sample_loops(model, c, radius, half, 2);
        const double s = 1.0 / std::sqrt(eps);
        const std::size_t n = loops.size();
        for (std::size_t k = 0; k < d; ++k) {
            std::vector<double> v(n);
            for (std::size_t p = 0; p < n; ++p) v[p] = s * loops.chart_coords[p * d + k];
            const double m = mean(v);
            double m2 = 0.0;
            double m4 = 0.0;
            for (double a : v) {
                m2 += (a - m) * (a - m);
                m4 += std::pow(a - m, 4);
            }
            m2 /= static_cast<double>(n);
            m4 /= static_cast<double>(n);
            report.coordinates[k].variance.push_back(variance(v));
            report.coordinates[k].variance_se.push_back(std::sqrt(std::max(m4 - m2 * m2, 0.0) / static_cast<double>(n)));
        }
    }
    for (auto& c : report.coordinates) {
        std::vector<double> lx;
        std::vector<double> ly;
        for (std::size_t i = 0; i < eps_grid.size(); ++i) {
            lx.push_back(std::log(eps_grid[i]));
            ly.push_back(std::log(c.variance[i]));
        }
        c.exponent = fit_line(lx, ly).slope;
        if (c.coordinate < d1) {
            c.passed = std::abs(c.exponent) <= tolerance;
        } else {
            c.passed = c.exponent >= c.weight - 1 - tolerance;
        }
    }
    return report;
}

namespace {

// Brownian bridge on a uniform grid of `steps` intervals: returns the midpoint
// and the trapezoidal integral of omega^4.
std::pair<double, double> bridge_sample(Philox4x32& rng, std::size_t steps, std::vector<double>& w) {
    const double h = 1.0 / static_cast<double>(steps);
    const double sh = std::sqrt(h);
    w[0] = 0.0;
    for (std::size_t k = 1; k <= steps; ++k) w[k] = w[k - 1] + sh * rng.next_normal();
    const double end = w[steps];
    double integral = 0.0;
    for (std::size_t k = 1; k < steps; ++k) {
        const double b = w[k] - static_cast<double>(k) * h * end;
        integral += b * b * b * b;
    }
    const std::size_t mid = steps / 2;
    return {w[mid] - static_cast<double>(mid) * h * end, integral * h};
}

struct WeightedMoments {
    double mean;
    double variance;
    double excess_kurtosis;
};

WeightedMoments weighted_moments(std::span<const double> x, std::span<const double> w) {
    double sw = 0.0;
    double m = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sw += w[i];
        m += w[i] * x[i];
    }
    m /= sw;
    double m2 = 0.0;
    double m4 = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double c = (x[i] - m) * (x[i] - m);
        m2 += w[i] * c;
        m4 += w[i] * c * c;
    }
    m2 /= sw;
    m4 /= sw;
    return {m, m2, m4 / (m2 * m2) - 3.0};
}

}  // namespace

BridgeOracleReport reweighted_bridge_oracle(std::size_t n, const BridgeOracleOptions& options) {
    if (n < 10000) throw InvalidArgument("bridge oracle needs at least 1e4 samples");
    if (options.steps < 2 || options.steps % 2 != 0) throw InvalidArgument("bridge grid needs an even step count");
    BridgeOracleReport report;
    report.n = n;
    std::vector<double> path(options.steps + 1);
    Philox4x32 weighted_rng(options.seed, 1);
    Philox4x32 plain_rng(options.seed, 2);
    report.midpoints.resize(n);
    report.weights.resize(n);
    std::vector<double> plain(n);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const auto [mid, integral] = bridge_sample(weighted_rng, options.steps, path);
        report.midpoints[i] = mid;
        report.weights[i] = options.unit_weights ? 1.0 : 1.0 / std::sqrt(integral);
        total += report.weights[i];
    }
    for (auto& w : report.weights) w /= total;
    for (std::size_t i = 0; i < n; ++i) plain[i] = bridge_sample(plain_rng, options.steps, path).first;

    report.ess = effective_sample_size(report.weights);
    if (report.ess < 100.0) throw EstimationError("effective sample size " + std::to_string(report.ess) + " < 100");
    report.weighted_vs_plain = ks_two_sample_weighted(report.midpoints, report.weights, plain, {});

    // permutation test: under the null the weights carry no information about the midpoint
    {
        std::vector<std::size_t> order(n);
        for (std::size_t i = 0; i < n; ++i) order[i] = i;
        std::sort(order.begin(), order.end(), [&](auto a, auto b) { return report.midpoints[a] < report.midpoints[b]; });
        std::vector<double> xa(n);
        std::vector<double> wa(n);
        for (std::size_t i = 0; i < n; ++i) {
            xa[i] = report.midpoints[order[i]];
            wa[i] = report.weights[order[i]];
        }
        std::vector<double> xb = plain;
        std::sort(xb.begin(), xb.end());
        const double inv_nb = 1.0 / static_cast<double>(xb.size());
        auto statistic = [&](const std::vector<double>& w) {
            double fa = 0.0;
            double fb = 0.0;
            double dmax = 0.0;
            std::size_t i = 0;
            std::size_t j = 0;
            while (i < xa.size() || j < xb.size()) {
                if (j == xb.size() || (i < xa.size() && xa[i] <= xb[j])) {
                    fa += w[i++];
                } else {
                    fb += inv_nb;
                    ++j;
                }
                dmax = std::max(dmax, std::abs(fa - fb));
            }
            return dmax;
        };
        const double observed = statistic(wa);
        Philox4x32 perm_rng(options.seed, 3);
        std::size_t exceed = 0;
        for (std::size_t p = 0; p < options.permutations; ++p) {
            std::shuffle(wa.begin(), wa.end(), perm_rng);
            if (statistic(wa) >= observed) ++exceed;
        }
        report.permutation_p = static_cast<double>(exceed + 1) / static_cast<double>(options.permutations + 1);
    }

    const WeightedMoments wm = weighted_moments(report.midpoints, report.weights);
    report.mean = wm.mean;
    report.variance = wm.variance;
    report.excess_kurtosis = wm.excess_kurtosis;
    {
        Philox4x32 boot_rng(options.seed, 4);
        std::vector<double> bx(n);
        std::vector<double> bw(n);
        std::vector<double> stats;
        for (std::size_t b = 0; b < options.bootstrap; ++b) {
            for (std::size_t i = 0; i < n; ++i) {
                const std::size_t j = static_cast<std::size_t>(boot_rng.next_uniform() * static_cast<double>(n));
                bx[i] = report.midpoints[std::min(j, n - 1)];
                bw[i] = report.weights[std::min(j, n - 1)];
            }
            stats.push_back(weighted_moments(bx, bw).excess_kurtosis);
        }
        if (!stats.empty()) {
            report.kurtosis_ci_low = quantile(stats, 0.025);
            report.kurtosis_ci_high = quantile(stats, 0.975);
        }
    }
    if (!options.loop_midpoints.empty()) {
        report.vs_loops = ks_two_sample_weighted(report.midpoints, report.weights, options.loop_midpoints, {});
    }
    return report;
}

namespace {

void stat_row(std::ostream& out, const std::string& name, double value, double se, double n) {
    out << name << ',' << value << ',' << se << ',' << n << '\n';
}

}  // namespace

void write_report_csv(std::ostream& out, const HeatSlopeReport& r) {
    out << "statistic,value,stderr,n\n";
    for (std::size_t i = 0; i < r.eps.size(); ++i) {
        const std::string tag = "eps=" + std::to_string(r.eps[i]);
        stat_row(out, "q_hat[" + tag + "]", r.rescaled[i].value, r.rescaled[i].std_error,
                 static_cast<double>(r.rescaled[i].n));
        stat_row(out, "p_hat[" + tag + "]", r.p_hat[i], r.p_se[i], static_cast<double>(r.rescaled[i].n));
    }
    stat_row(out, "slope", r.fit.slope, r.fit.slope_se, static_cast<double>(r.fit.n));
    stat_row(out, "expected_slope", r.expected(), 0.0, static_cast<double>(r.fit.n));
    stat_row(out, "q_lower99", r.q_lower99, 0.0, static_cast<double>(r.rescaled.empty() ? 0 : r.rescaled.back().n));
}

void write_report_csv(std::ostream& out, const LoopComparison& r, double eps) {
    out << "statistic,value,stderr,n\n";
    for (const auto& e : r.ks) {
        stat_row(out, "ks[eps=" + std::to_string(eps) + ",t=" + std::to_string(e.time) + ",coord=" +
                          std::to_string(e.coordinate + 1) + "]",
                 e.ks.statistic, 0.0, e.ks.n_effective);
    }
    stat_row(out, "energy[eps=" + std::to_string(eps) + "]", r.energy.statistic, 0.0,
             static_cast<double>(r.energy.n_a + r.energy.n_b));
    stat_row(out, "energy_p[eps=" + std::to_string(eps) + "]", r.energy.p_value, 0.0,
             static_cast<double>(r.energy.permutations));
}

void write_report_csv(std::ostream& out, const TightnessReport& r) {
    out << "statistic,value,stderr,n\n";
    for (const auto& row : r.rows) {
        stat_row(out, "moment4[eps=" + std::to_string(row.eps) + ",lag=" + std::to_string(row.lag) + "]", row.moment,
                 row.std_error, 0.0);
    }
    for (std::size_t i = 0; i < r.exponents.size(); ++i) {
        stat_row(out, "exponent[" + std::to_string(i) + "]", r.exponents[i], 0.0, 0.0);
    }
    stat_row(out, "min_exponent", r.min_exponent, 0.0, 0.0);
    stat_row(out, "sup_prefactor", r.sup_prefactor, 0.0, 0.0);
}

void write_report_csv(std::ostream& out, const CollapseReport& r) {
    out << "statistic,value,stderr,n\n";
    if (r.vacuous) {
        stat_row(out, "vacuous", 1.0, 0.0, 0.0);
        return;
    }
    for (const auto& c : r.coordinates) {
        for (std::size_t i = 0; i < r.eps.size(); ++i) {
            stat_row(out, "variance[eps=" + std::to_string(r.eps[i]) + ",coord=" + std::to_string(c.coordinate + 1) + "]",
                     c.variance[i], c.variance_se[i], 0.0);
        }
        stat_row(out, "exponent[coord=" + std::to_string(c.coordinate + 1) + "]", c.exponent, 0.0, 0.0);
    }
}

void write_report_csv(std::ostream& out, const BridgeOracleReport& r) {
    out << "statistic,value,stderr,n\n";
    const double n = static_cast<double>(r.n);
    stat_row(out, "ess", r.ess, 0.0, n);
    stat_row(out, "ks_weighted_vs_plain", r.weighted_vs_plain.statistic, 0.0, n);
    stat_row(out, "permutation_p", r.permutation_p, 0.0, n);
    stat_row(out, "weighted_mean", r.mean, 0.0, n);
    stat_row(out, "weighted_variance", r.variance, 0.0, n);
    stat_row(out, "excess_kurtosis", r.excess_kurtosis, 0.0, n);
    stat_row(out, "excess_kurtosis_ci_low", r.kurtosis_ci_low, 0.0, n);
    stat_row(out, "excess_kurtosis_ci_high", r.kurtosis_ci_high, 0.0, n);
    if (r.vs_loops) stat_row(out, "ks_weighted_vs_loops", r.vs_loops->statistic, 0.0, r.vs_loops->n_effective);
}

void write_long_format(std::ostream& out, const LoopEnsemble& e) {
    for (std::size_t t = 0; t < e.times.size(); ++t) {
        for (std::size_t k = 0; k < e.dim; ++k) {
            const auto v = e.marginal(t, k);
            if (v.size() < 2) continue;
            out << e.eps << ',' << e.times[t] << ',' << k + 1 << ",mean," << mean(v) << '\n';
            out << e.eps << ',' << e.times[t] << ',' << k + 1 << ",variance," << variance(v) << '\n';
        }
    }
}

}  // namespace srl
