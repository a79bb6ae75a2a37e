#include "srl/simulate.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <mutex>
#include <ostream>
#include <thread>

#include <Eigen/Dense>

#include "srl/errors.hpp"
#include "srl/rng.hpp"

namespace srl {

void SimConfig::validate() const {
    if (!(eps > 0.0) || !std::isfinite(eps)) throw InvalidArgument("eps must be positive");
    if (steps < 1) throw InvalidArgument("steps must be >= 1");
    if (paths < 1) throw InvalidArgument("paths must be >= 1");
    if (chunk_size < 1) throw InvalidArgument("chunk size must be >= 1");
}

namespace {

struct ChunkResult {
    std::size_t simulated = 0;
    std::size_t flagged = 0;
    std::vector<std::uint64_t> path_ids;
    std::vector<double> terminal;
    std::vector<double> trajectories;
    std::vector<double> v_path;
    std::vector<double> v;
    std::vector<double> u;
    std::vector<double> malliavin;
    std::vector<double> lambda_min;
    double max_clip = 0.0;
};

// out = a * b for d x d row-major matrices
inline void matmul(const double* a, const double* b, double* out, std::size_t d) {
    for (std::size_t r = 0; r < d; ++r) {
        for (std::size_t c = 0; c < d; ++c) {
            double s = 0.0;
            for (std::size_t k = 0; k < d; ++k) s += a[r * d + k] * b[k * d + c];
            out[r * d + c] = s;
        }
    }
}

class PathIntegrator {
public:
    PathIntegrator(const SdeModel& model, const SimConfig& config, const RecordOptions& options,
                   std::span<const std::size_t> record_steps)
        : model_(model), config_(config), options_(options), record_steps_(record_steps), d_(model.dim()),
          m_(model.count()) {
        need_jac_ = options.jacobian || options.forward_jacobian || options.malliavin || options.v_trajectory;
        need_v_ = options.jacobian || options.malliavin || options.v_trajectory;
        x_.resize(d_);
        xn_.resize(d_);
        diff_.resize(m_ * d_);
        drift_.resize(d_);
        djac_.resize(m_ * d_ * d_);
        drift_jac_.resize(d_ * d_);
        v_.resize(d_ * d_);
        vn_.resize(d_ * d_);
        u_.resize(d_ * d_);
        un_.resize(d_ * d_);
        tmp_.resize(d_ * d_);
        corr_.resize(d_ * d_);
        c_.resize(d_ * d_);
        dB_.resize(m_);
        a_.resize(d_);
        traj_.resize(record_steps.size() * d_);
        vtraj_.resize(options.v_trajectory ? record_steps.size() * d_ * d_ : 0);
        inv_scale_.assign(d_, 1.0);
        if (options.malliavin) {
            if (!model.weights) throw InvalidArgument("Malliavin matrix needs dilation weights on the model");
            for (std::size_t k = 0; k < d_; ++k) inv_scale_[k] = std::pow(config.eps, -0.5 * (*model.weights)[k]);
        }
    }

    // Returns false when the path is flagged.
    bool run(Philox4x32& rng) {
        const double eps = config_.eps;
        const double se = std::sqrt(eps);
        const double dt = 1.0 / static_cast<double>(config_.steps);
        const double sdt = std::sqrt(dt);
        std::copy(model_.start.begin(), model_.start.end(), x_.begin());
        identity(v_);
        identity(u_);
        std::fill(c_.begin(), c_.end(), 0.0);
        std::size_t rec = 0;
        bool ok = true;
        for (std::size_t n = 0; n < config_.steps; ++n) {
            record(rec, n);
            model_.fields->values(x_.data(), diff_.data(), drift_.data(), scratch_);
            if (need_jac_) model_.fields->jacobians(x_.data(), djac_.data(), drift_jac_.data(), scratch_);
            if (options_.malliavin) accumulate(n == 0 ? 0.5 * dt : dt, se);
            for (std::size_t i = 0; i < m_; ++i) dB_[i] = sdt * rng.next_normal();

            double norm2 = 0.0;
            for (std::size_t k = 0; k < d_; ++k) {
                double s = 0.0;
                for (std::size_t i = 0; i < m_; ++i) s += diff_[i * d_ + k] * dB_[i];
                xn_[k] = x_[k] + se * s + eps * drift_[k] * dt;
                norm2 += xn_[k] * xn_[k];
            }
            if (need_v_) step_v(se, eps, dt);
            if (options_.forward_jacobian) step_u(se, eps, dt);
            x_.swap(xn_);
            if (!std::isfinite(norm2) || norm2 > options_.max_norm * options_.max_norm) {
                ok = false;
                // keep consuming this path's draws so the stream position depends only on the path index
                for (std::size_t r = n + 1; r < config_.steps; ++r) {
                    for (std::size_t i = 0; i < m_; ++i) rng.next_normal();
                }
                break;
            }
        }
        if (!ok) return false;
        record(rec, config_.steps);
        if (options_.malliavin) {
            model_.fields->values(x_.data(), diff_.data(), drift_.data(), scratch_);
            accumulate(0.5 * dt, se);
        }
        for (double a : v_) {
            if (!std::isfinite(a)) return false;
        }
        return true;
    }

    void store(ChunkResult& out, std::uint64_t id) {
        out.path_ids.push_back(id);
        out.terminal.insert(out.terminal.end(), x_.begin(), x_.end());
        out.trajectories.insert(out.trajectories.end(), traj_.begin(), traj_.end());
        out.v_path.insert(out.v_path.end(), vtraj_.begin(), vtraj_.end());
        if (options_.jacobian) out.v.insert(out.v.end(), v_.begin(), v_.end());
        if (options_.forward_jacobian) out.u.insert(out.u.end(), u_.begin(), u_.end());
        if (options_.malliavin) {
            double clip = 0.0;
            const double lmin = finish_malliavin(clip);
            out.malliavin.insert(out.malliavin.end(), c_.begin(), c_.end());
            out.lambda_min.push_back(lmin);
            out.max_clip = std::max(out.max_clip, clip);
        }
    }

    std::span<const double> terminal() const { return x_; }

private:
    void identity(std::vector<double>& a) const {
        std::fill(a.begin(), a.end(), 0.0);
        for (std::size_t k = 0; k < d_; ++k) a[k * d_ + k] = 1.0;
    }

    void record(std::size_t& rec, std::size_t n) {
        while (rec < record_steps_.size() && record_steps_[rec] == n) {
            std::copy(x_.begin(), x_.end(), traj_.begin() + static_cast<std::ptrdiff_t>(rec * d_));
            if (options_.v_trajectory) {
                std::copy(v_.begin(), v_.end(), vtraj_.begin() + static_cast<std::ptrdiff_t>(rec * d_ * d_));
            }
            ++rec;
        }
    }

    // c += w * sum_i a_i a_i^T with a_i = sqrt(eps) delta^{-1}(v X_i(x))
    void accumulate(double w, double se) {
        for (std::size_t i = 0; i < m_; ++i) {
            const double* xi = diff_.data() + i * d_;
            for (std::size_t r = 0; r < d_; ++r) {
                double s = 0.0;
                for (std::size_t k = 0; k < d_; ++k) s += v_[r * d_ + k] * xi[k];
                a_[r] = se * inv_scale_[r] * s;
            }
            for (std::size_t r = 0; r < d_; ++r) {
                for (std::size_t c = 0; c < d_; ++c) c_[r * d_ + c] += w * a_[r] * a_[c];
            }
        }
    }

    // v' = v - sqrt(eps) sum_i dB_i v J_i - eps dt v (J0 - sum_i J_i^2)
    void step_v(double se, double eps, double dt) {
        std::copy(drift_jac_.begin(), drift_jac_.end(), corr_.begin());
        for (std::size_t i = 0; i < m_; ++i) {
            const double* ji = djac_.data() + i * d_ * d_;
            matmul(ji, ji, tmp_.data(), d_);
            for (std::size_t q = 0; q < d_ * d_; ++q) corr_[q] -= tmp_[q];
        }
        for (std::size_t q = 0; q < d_ * d_; ++q) corr_[q] *= eps * dt;
        for (std::size_t i = 0; i < m_; ++i) {
            const double* ji = djac_.data() + i * d_ * d_;
            for (std::size_t q = 0; q < d_ * d_; ++q) corr_[q] += se * dB_[i] * ji[q];
        }
        matmul(v_.data(), corr_.data(), vn_.data(), d_);
        for (std::size_t q = 0; q < d_ * d_; ++q) vn_[q] = v_[q] - vn_[q];
        v_.swap(vn_);
    }

    // u' = u + sqrt(eps) sum_i dB_i J_i u + eps dt J0 u
    void step_u(double se, double eps, double dt) {
        for (std::size_t q = 0; q < d_ * d_; ++q) corr_[q] = eps * dt * drift_jac_[q];
        for (std::size_t i = 0; i < m_; ++i) {
            const double* ji = djac_.data() + i * d_ * d_;
            for (std::size_t q = 0; q < d_ * d_; ++q) corr_[q] += se * dB_[i] * ji[q];
        }
        matmul(corr_.data(), u_.data(), un_.data(), d_);
        for (std::size_t q = 0; q < d_ * d_; ++q) un_[q] += u_[q];
        u_.swap(un_);
    }

    double finish_malliavin(double& clip) {
        Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> c(
            c_.data(), static_cast<Eigen::Index>(d_), static_cast<Eigen::Index>(d_));
        const Eigen::MatrixXd sym = 0.5 * (c + c.transpose());
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym);
        Eigen::VectorXd ev = es.eigenvalues();
        const double tol = 1e-14 * std::abs(sym.trace());
        clip = 0.0;
        bool clipped = false;
        for (Eigen::Index k = 0; k < ev.size(); ++k) {
            if (ev(k) < 0.0) {
                clip = std::max(clip, -ev(k));
                ev(k) = 0.0;
                clipped = true;
            } else if (ev(k) < tol) {
                ev(k) = 0.0;
            }
        }
        if (clipped) {
            c = es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
        } else {
            c = sym;
        }
        return ev.minCoeff();
    }

    const SdeModel& model_;
    const SimConfig& config_;
    const RecordOptions& options_;
    std::span<const std::size_t> record_steps_;
    std::size_t d_;
    std::size_t m_;
    bool need_jac_ = false;
    bool need_v_ = false;
    std::vector<double> x_, xn_, diff_, drift_, djac_, drift_jac_, v_, vn_, u_, un_, tmp_, corr_, c_, dB_, a_;
    std::vector<double> traj_, vtraj_, inv_scale_, scratch_;
};

}  // namespace

PathEnsemble run_ensemble(const SdeModel& model, const SimConfig& config, const RecordOptions& options) {
    config.validate();
    if (!model.fields) throw InvalidArgument("model has no fields");
    if (model.start.size() != model.dim()) throw DimensionMismatch(model.dim(), model.start.size(), "run_ensemble");

    std::vector<std::size_t> record_steps;
    PathEnsemble ens;
    for (double t : options.times) {
        if (!(t >= 0.0 && t <= 1.0)) throw InvalidArgument("record times must lie in [0, 1]");
        record_steps.push_back(static_cast<std::size_t>(std::llround(t * static_cast<double>(config.steps))));
    }
    std::sort(record_steps.begin(), record_steps.end());
    for (auto n : record_steps) ens.times.push_back(static_cast<double>(n) / static_cast<double>(config.steps));

    const std::size_t chunks = config.chunk_count();
    std::vector<ChunkResult> results(chunks);
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;

    auto worker = [&] {
        try {
            PathIntegrator integrator(model, config, options, record_steps);
            for (;;) {
                const std::size_t c = next.fetch_add(1);
                if (c >= chunks) break;
                Philox4x32 rng(config.master_seed, c);
                ChunkResult& out = results[c];
                const std::size_t begin = c * config.chunk_size;
                const std::size_t end = std::min(config.paths, begin + config.chunk_size);
                for (std::size_t p = begin; p < end; ++p) {
                    ++out.simulated;
                    if (!integrator.run(rng)) {
                        ++out.flagged;
                        continue;
                    }
                    if (options.keep && !options.keep(integrator.terminal())) continue;
                    integrator.store(out, p);
                }
            }
        } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
            next.store(chunks);
        }
    };

    std::size_t workers = config.workers == 0 ? std::max(1u, std::thread::hardware_concurrency()) : config.workers;
    workers = std::min(workers, chunks);
    if (workers <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    if (failure) std::rethrow_exception(failure);

    ens.config = config;
    ens.dim = model.dim();
    ens.seed = config.master_seed;
    ens.chunks = chunks;
    for (auto& r : results) {
        ens.simulated += r.simulated;
        ens.flagged += r.flagged;
        auto append = [](auto& dst, auto& src) { dst.insert(dst.end(), src.begin(), src.end()); };
        append(ens.path_ids, r.path_ids);
        append(ens.terminal, r.terminal);
        append(ens.trajectories, r.trajectories);
        append(ens.v_path, r.v_path);
        append(ens.v, r.v);
        append(ens.u, r.u);
        append(ens.malliavin, r.malliavin);
        append(ens.lambda_min, r.lambda_min);
        ens.max_clip = std::max(ens.max_clip, r.max_clip);
    }
    if (ens.flagged * 100 > ens.simulated) {
        throw SimulationError(std::to_string(ens.flagged) + " of " + std::to_string(ens.simulated) +
                              " paths overflowed (more than 1%)");
    }
    return ens;
}

PathEnsemble simulate_paths(const SdeModel& model, const SimConfig& config, std::span<const double> times) {
    RecordOptions options;
    options.times.assign(times.begin(), times.end());
    return run_ensemble(model, config, options);
}

PathEnsemble simulate_with_jacobian(const SdeModel& model, const SimConfig& config, bool forward) {
    RecordOptions options;
    options.jacobian = true;
    options.forward_jacobian = forward;
    return run_ensemble(model, config, options);
}

PathEnsemble malliavin_covariance(const SdeModel& model, const SimConfig& config) {
    RecordOptions options;
    options.malliavin = true;
    return run_ensemble(model, config, options);
}

PathEnsemble simulate_limit(const NilpotentSystem& sys, const SimConfig& config, const RecordOptions& options) {
    SimConfig c = config;
    c.eps = 1.0;
    return run_ensemble(make_limit_model(sys), c, options);
}

void write_ensemble_csv(std::ostream& out, const PathEnsemble& ens) {
    const std::size_t d = ens.dim;
    const bool has_v = !ens.v.empty() || !ens.v_path.empty();
    const bool has_lambda = !ens.lambda_min.empty();
    out << "path_id,time";
    for (std::size_t k = 0; k < d; ++k) out << ",x" << k + 1;
    if (has_v) {
        for (std::size_t r = 0; r < d; ++r) {
            for (std::size_t c = 0; c < d; ++c) out << ",v" << r + 1 << c + 1;
        }
    }
    if (has_lambda) out << ",lambda_min";
    out << '\n';

    char buf[40];
    auto num = [&](double x) {
        std::snprintf(buf, sizeof buf, "%.17g", x);
        out << ',' << buf;
    };
    const bool terminal_recorded = !ens.times.empty() && ens.times.back() == 1.0;
    for (std::size_t p = 0; p < ens.size(); ++p) {
        auto row = [&](double t, std::span<const double> x, const double* vm, bool last) {
            out << ens.path_ids[p];
            num(t);
            for (double a : x) num(a);
            if (has_v) {
                for (std::size_t q = 0; q < d * d; ++q) {
                    if (vm) {
                        num(vm[q]);
                    } else {
                        out << ',';
                    }
                }
            }
            if (has_lambda) {
                if (last) {
                    num(ens.lambda_min[p]);
                } else {
                    out << ',';
                }
            }
            out << '\n';
        };
        const double* vterm = ens.v.empty() ? nullptr : ens.v.data() + p * d * d;
        for (std::size_t t = 0; t < ens.times.size(); ++t) {
            const bool last = terminal_recorded && t + 1 == ens.times.size();
            const double* vm = !ens.v_path.empty() ? ens.v_path.data() + (p * ens.times.size() + t) * d * d
                                                   : (last ? vterm : nullptr);
            row(ens.times[t], ens.state_at(p, t), vm, last);
        }
        if (!terminal_recorded) row(1.0, ens.terminal_of(p), vterm, true);
    }
}

}  // namespace srl
