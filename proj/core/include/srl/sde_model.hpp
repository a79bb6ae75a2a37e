#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "srl/chart.hpp"
#include "srl/compiled.hpp"
#include "srl/nilpotent.hpp"
#include "srl/vector_field.hpp"

namespace srl {

/// Double-precision evaluators for the diffusion fields X_1..X_m and the Ito
/// drift (unscaled; the integrator multiplies it by eps). Implementations are
/// immutable and safe to share between threads; all scratch space is passed in.
class ModelFields {
public:
    virtual ~ModelFields() = default;

    virtual std::size_t dim() const = 0;
    virtual std::size_t count() const = 0;

    /// diffusion[i * d + k] = X_i^k(x), drift[k] = X0^k(x).
    virtual void values(const double* x, double* diffusion, double* drift, std::vector<double>& scratch) const = 0;

    /// diffusion_jac[(i * d + k) * d + j] = d_j X_i^k(x), drift_jac[k * d + j] = d_j X0^k(x).
    virtual void jacobians(const double* x, double* diffusion_jac, double* drift_jac,
                           std::vector<double>& scratch) const = 0;
};

class PolynomialModelFields : public ModelFields {
public:
    PolynomialModelFields(std::vector<PolyVectorField> diffusion, PolyVectorField ito_drift);

    std::size_t dim() const override { return dim_; }
    std::size_t count() const override { return diffusion_.size(); }
    void values(const double* x, double* diffusion, double* drift, std::vector<double>& scratch) const override;
    void jacobians(const double* x, double* diffusion_jac, double* drift_jac,
                   std::vector<double>& scratch) const override;

    const std::vector<PolyVectorField>& diffusion() const { return diffusion_; }
    const PolyVectorField& ito_drift() const { return drift_; }

private:
    std::size_t dim_;
    std::vector<PolyVectorField> diffusion_;
    PolyVectorField drift_;
    CompiledPolys values_;
    CompiledPolys jacobians_;
};

/// C^2 radial cutoffs: chi = 1 - s(t), rho = s(t) with t = (|z| - r1) / (r2 - r1)
/// and s the quintic smoothstep clamped to [0, 1].
struct RadialCutoff {
    double r1;
    double r2;

    /// Returns chi(z) and writes grad chi into grad (grad rho = -grad chi).
    double chi(const double* z, std::size_t d, double* grad) const;
};

/// The bounded system chi * theta_* X_i (i <= m) and rho * e_k (k <= d) on
/// chart coordinates, with drift chi * theta_* X0 plus the Ito correction.
class LocalizedModelFields : public ModelFields {
public:
    LocalizedModelFields(std::vector<PolyVectorField> pushed, PolyVectorField pushed_drift, RadialCutoff cutoff);

    std::size_t dim() const override { return dim_; }
    std::size_t count() const override { return m_ + dim_; }
    void values(const double* x, double* diffusion, double* drift, std::vector<double>& scratch) const override;
    void jacobians(const double* x, double* diffusion_jac, double* drift_jac,
                   std::vector<double>& scratch) const override;

    const RadialCutoff& cutoff() const { return cutoff_; }

private:
    /// Writes the drift, leaves theta_* X values at the front of scratch, returns chi.
    double drift_only(const double* x, double* drift, std::vector<double>& scratch) const;

    std::size_t dim_;
    std::size_t m_;
    RadialCutoff cutoff_;
    CompiledPolys values_;     // theta_* X_i (m*d), theta_* X0 (d)
    CompiledPolys jacobians_;  // d_j of the above, (m+1)*d*d
};

struct SdeModel {
    std::shared_ptr<const ModelFields> fields;
    std::vector<double> start;
    /// Map from model coordinates to adapted coordinates; identity when absent.
    std::optional<CompiledPolys> chart;
    std::vector<double> chart_origin;  // chart(start)
    /// Dilation weights of the adapted coordinates, when known.
    std::optional<Weights> weights;
    std::string label;

    std::size_t dim() const { return fields->dim(); }
    std::size_t count() const { return fields->count(); }

    /// delta_eps^{-1}(chart(x) - chart(start)).
    std::vector<double> rescale(std::span<const double> x, double eps) const;
    /// chart(x) - chart(start).
    std::vector<double> chart_coordinates(std::span<const double> x) const;
};

/// Stratonovich fields X_i with generator drift X0 in their own coordinates.
SdeModel make_polynomial_model(std::vector<PolyVectorField> generators, const PolyVectorField& x0,
                               std::span<const Rational> start, std::string label = "polynomial");

/// Attaches a chart (model coordinates to adapted coordinates) and weights.
SdeModel with_chart(SdeModel model, const PolyMap& theta, const Weights& weights);

/// theta_* X_i and theta_* X0, started at theta(x) = 0. The model coordinates
/// are already adapted.
SdeModel make_adapted_model(std::span<const PolyVectorField> generators, const PolyVectorField& x0,
                            const AdaptedChart& chart, std::string label = "adapted");

/// The limiting system X~_i with drift 1/2 sum_i nabla_{X~_i} X~_i, started at 0.
/// Run it at eps = 1.
SdeModel make_limit_model(const NilpotentSystem& sys, std::string label = "limit");

/// Localized model of the chart pushforward. Requires 0 < r1 < r2.
SdeModel localize_model(std::span<const PolyVectorField> generators, const PolyVectorField& x0,
                        const AdaptedChart& chart, double r1, double r2, std::string label = "localized");

}  // namespace srl
