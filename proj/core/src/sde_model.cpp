#include "srl/sde_model.hpp"

#include <cmath>

#include "srl/errors.hpp"

namespace srl {

namespace {

std::vector<Polynomial> value_polys(std::span<const PolyVectorField> fields, const PolyVectorField& drift) {
    std::vector<Polynomial> out;
    for (const auto& f : fields) out.insert(out.end(), f.components().begin(), f.components().end());
    out.insert(out.end(), drift.components().begin(), drift.components().end());
    return out;
}

std::vector<Polynomial> jacobian_polys(std::span<const PolyVectorField> fields, const PolyVectorField& drift) {
    std::vector<Polynomial> out;
    auto push = [&](const PolyVectorField& f) {
        for (std::size_t k = 0; k < f.dim(); ++k) {
            for (std::size_t j = 0; j < f.dim(); ++j) out.push_back(f[k].derivative(j));
        }
    };
    for (const auto& f : fields) push(f);
    push(drift);
    return out;
}

std::vector<double> to_double(std::span<const Rational> v) {
    std::vector<double> out;
    for (const auto& q : v) out.push_back(q.get_d());
    return out;
}

void require_dims(std::span<const PolyVectorField> fields, const PolyVectorField& drift, const char* where) {
    if (fields.empty()) throw InvalidArgument(std::string(where) + ": need at least one diffusion field");
    for (const auto& f : fields) {
        if (f.dim() != drift.dim()) throw DimensionMismatch(drift.dim(), f.dim(), where);
    }
}

}  // namespace

PolynomialModelFields::PolynomialModelFields(std::vector<PolyVectorField> diffusion, PolyVectorField ito_drift)
    : dim_(ito_drift.dim()), diffusion_(std::move(diffusion)), drift_(std::move(ito_drift)) {
    require_dims(diffusion_, drift_, "PolynomialModelFields");
    const auto v = value_polys(diffusion_, drift_);
    const auto j = jacobian_polys(diffusion_, drift_);
    values_ = CompiledPolys(v);
    jacobians_ = CompiledPolys(j);
}

void PolynomialModelFields::values(const double* x, double* diffusion, double* drift,
                                   std::vector<double>& scratch) const {
    const std::size_t n = values_.size();
    scratch.resize(n + values_.scratch_size());
    values_.evaluate(x, scratch.data(), scratch.data() + n);
    const std::size_t md = diffusion_.size() * dim_;
    std::copy(scratch.begin(), scratch.begin() + static_cast<std::ptrdiff_t>(md), diffusion);
    std::copy(scratch.begin() + static_cast<std::ptrdiff_t>(md), scratch.begin() + static_cast<std::ptrdiff_t>(n),
              drift);
}

void PolynomialModelFields::jacobians(const double* x, double* diffusion_jac, double* drift_jac,
                                      std::vector<double>& scratch) const {
    const std::size_t n = jacobians_.size();
    scratch.resize(n + jacobians_.scratch_size());
    jacobians_.evaluate(x, scratch.data(), scratch.data() + n);
    const std::size_t mdd = diffusion_.size() * dim_ * dim_;
    std::copy(scratch.begin(), scratch.begin() + static_cast<std::ptrdiff_t>(mdd), diffusion_jac);
    std::copy(scratch.begin() + static_cast<std::ptrdiff_t>(mdd), scratch.begin() + static_cast<std::ptrdiff_t>(n),
              drift_jac);
}

double RadialCutoff::chi(const double* z, std::size_t d, double* grad) const {
    double r2sum = 0.0;
    for (std::size_t k = 0; k < d; ++k) r2sum += z[k] * z[k];
    const double r = std::sqrt(r2sum);
    const double t = (r - r1) / (r2 - r1);
    std::fill(grad, grad + d, 0.0);
    if (t <= 0.0) return 1.0;
    if (t >= 1.0) return 0.0;
    const double s = t * t * t * (10.0 + t * (-15.0 + 6.0 * t));
    const double ds = 30.0 * t * t * (1.0 - t) * (1.0 - t) / (r2 - r1);
    for (std::size_t k = 0; k < d; ++k) grad[k] = -ds * z[k] / r;
    return 1.0 - s;
}

LocalizedModelFields::LocalizedModelFields(std::vector<PolyVectorField> pushed, PolyVectorField pushed_drift,
                                           RadialCutoff cutoff)
    : dim_(pushed_drift.dim()), m_(pushed.size()), cutoff_(cutoff) {
    require_dims(pushed, pushed_drift, "LocalizedModelFields");
    if (!(cutoff_.r1 > 0.0) || !(cutoff_.r2 > cutoff_.r1)) throw InvalidArgument("cutoff radii need 0 < r1 < r2");
    const auto v = value_polys(pushed, pushed_drift);
    const auto j = jacobian_polys(pushed, pushed_drift);
    values_ = CompiledPolys(v);
    jacobians_ = CompiledPolys(j);
}

double LocalizedModelFields::drift_only(const double* x, double* drift, std::vector<double>& scratch) const {
    const std::size_t d = dim_;
    const std::size_t nv = values_.size();
    const std::size_t nj = jacobians_.size();
    scratch.resize(nv + nj + d + std::max(values_.scratch_size(), jacobians_.scratch_size()));
    double* z = scratch.data();
    double* jz = z + nv;
    double* grad = jz + nj;
    double* pw = grad + d;
    values_.evaluate(x, z, pw);
    jacobians_.evaluate(x, jz, pw);
    const double chi = cutoff_.chi(x, d, grad);

    for (std::size_t k = 0; k < d; ++k) drift[k] = chi * z[m_ * d + k];
    for (std::size_t i = 0; i < m_; ++i) {
        const double* zi = z + i * d;
        const double* ji = jz + i * d * d;
        double dchi = 0.0;
        for (std::size_t j = 0; j < d; ++j) dchi += grad[j] * zi[j];
        for (std::size_t k = 0; k < d; ++k) {
            double jzz = 0.0;
            for (std::size_t j = 0; j < d; ++j) jzz += ji[k * d + j] * zi[j];
            drift[k] += 0.5 * (chi * chi * jzz + chi * dchi * zi[k]);
        }
    }
    // rho * grad rho with rho = 1 - chi
    for (std::size_t k = 0; k < d; ++k) drift[k] += 0.5 * (1.0 - chi) * (-grad[k]);
    return chi;
}

void LocalizedModelFields::values(const double* x, double* diffusion, double* drift,
                                  std::vector<double>& scratch) const {
    const std::size_t d = dim_;
    const double chi = drift_only(x, drift, scratch);
    const double* z = scratch.data();
    for (std::size_t i = 0; i < m_; ++i) {
        for (std::size_t k = 0; k < d; ++k) diffusion[i * d + k] = chi * z[i * d + k];
    }
    for (std::size_t kk = 0; kk < d; ++kk) {
        for (std::size_t k = 0; k < d; ++k) diffusion[(m_ + kk) * d + k] = k == kk ? 1.0 - chi : 0.0;
    }
}

void LocalizedModelFields::jacobians(const double* x, double* diffusion_jac, double* drift_jac,
                                     std::vector<double>& scratch) const {
    const std::size_t d = dim_;
    const std::size_t nv = values_.size();
    const std::size_t nj = jacobians_.size();
    std::vector<double> z(nv);
    std::vector<double> jz(nj);
    std::vector<double> grad(d);
    std::vector<double> pw(std::max(values_.scratch_size(), jacobians_.scratch_size()));
    values_.evaluate(x, z.data(), pw.data());
    jacobians_.evaluate(x, jz.data(), pw.data());
    const double chi = cutoff_.chi(x, d, grad.data());
    for (std::size_t i = 0; i < m_; ++i) {
        for (std::size_t k = 0; k < d; ++k) {
            for (std::size_t j = 0; j < d; ++j) {
                diffusion_jac[(i * d + k) * d + j] = chi * jz[(i * d + k) * d + j] + z[i * d + k] * grad[j];
            }
        }
    }
    for (std::size_t kk = 0; kk < d; ++kk) {
        for (std::size_t k = 0; k < d; ++k) {
            for (std::size_t j = 0; j < d; ++j) {
                diffusion_jac[((m_ + kk) * d + k) * d + j] = k == kk ? -grad[j] : 0.0;
            }
        }
    }
    // drift Jacobian by central differences
    std::vector<double> xp(x, x + d);
    std::vector<double> fp(d);
    std::vector<double> fm(d);
    for (std::size_t j = 0; j < d; ++j) {
        const double h = 1e-5 * std::max(1.0, std::abs(x[j]));
        xp[j] = x[j] + h;
        drift_only(xp.data(), fp.data(), scratch);
        xp[j] = x[j] - h;
        drift_only(xp.data(), fm.data(), scratch);
        xp[j] = x[j];
        for (std::size_t k = 0; k < d; ++k) drift_jac[k * d + j] = (fp[k] - fm[k]) / (2.0 * h);
    }
}

std::vector<double> SdeModel::chart_coordinates(std::span<const double> x) const {
    if (x.size() != dim()) throw DimensionMismatch(dim(), x.size(), "SdeModel::chart_coordinates");
    std::vector<double> c = chart ? (*chart)(x) : std::vector<double>(x.begin(), x.end());
    for (std::size_t k = 0; k < c.size(); ++k) c[k] -= chart_origin[k];
    return c;
}

std::vector<double> SdeModel::rescale(std::span<const double> x, double eps) const {
    if (!weights) throw InvalidArgument("model '" + label + "' has no dilation weights");
    return dilate_inverse(chart_coordinates(x), eps, *weights);
}

SdeModel make_polynomial_model(std::vector<PolyVectorField> generators, const PolyVectorField& x0,
                               std::span<const Rational> start, std::string label) {
    if (start.size() != x0.dim()) throw DimensionMismatch(x0.dim(), start.size(), "make_polynomial_model");
    PolyVectorField drift = ito_drift_correction(x0, generators);
    SdeModel model;
    model.fields = std::make_shared<PolynomialModelFields>(std::move(generators), std::move(drift));
    model.start = to_double(start);
    model.chart_origin = model.start;
    model.label = std::move(label);
    return model;
}

SdeModel with_chart(SdeModel model, const PolyMap& theta, const Weights& weights) {
    if (theta.dim() != model.dim()) throw DimensionMismatch(model.dim(), theta.dim(), "with_chart");
    if (weights.size() != model.dim()) throw DimensionMismatch(model.dim(), weights.size(), "with_chart");
    model.chart = CompiledPolys(theta.components());
    model.chart_origin = (*model.chart)(model.start);
    model.weights = weights;
    return model;
}

SdeModel make_adapted_model(std::span<const PolyVectorField> generators, const PolyVectorField& x0,
                            const AdaptedChart& chart, std::string label) {
    std::vector<PolyVectorField> pushed;
    for (const auto& g : generators) pushed.push_back(pushforward(chart.theta(), g));
    const PolyVectorField pushed_drift = pushforward(chart.theta(), x0);
    const std::size_t d = x0.dim();
    SdeModel model =
        make_polynomial_model(std::move(pushed), pushed_drift, RationalVector(d, Rational(0)), std::move(label));
    model.weights = chart.structure().weights();
    return model;
}

SdeModel make_limit_model(const NilpotentSystem& sys, std::string label) {
    SdeModel model;
    model.fields = std::make_shared<PolynomialModelFields>(sys.fields, sys.drift_tilde);
    model.start.assign(sys.dim(), 0.0);
    model.chart_origin = model.start;
    model.weights = sys.weights();
    model.label = std::move(label);
    return model;
}

SdeModel localize_model(std::span<const PolyVectorField> generators, const PolyVectorField& x0,
                        const AdaptedChart& chart, double r1, double r2, std::string label) {
    std::vector<PolyVectorField> pushed;
    for (const auto& g : generators) pushed.push_back(pushforward(chart.theta(), g));
    PolyVectorField pushed_drift = pushforward(chart.theta(), x0);
    SdeModel model;
    model.fields = std::make_shared<LocalizedModelFields>(std::move(pushed), std::move(pushed_drift),
                                                          RadialCutoff{r1, r2});
    model.start.assign(x0.dim(), 0.0);
    model.chart_origin = model.start;
    model.weights = chart.structure().weights();
    model.label = std::move(label);
    return model;
}

}  // namespace srl
