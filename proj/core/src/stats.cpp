#include "srl/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "srl/errors.hpp"
#include "srl/rng.hpp"

namespace srl {

double mean(std::span<const double> x) {
    if (x.empty()) throw EstimationError("mean of an empty sample");
    return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

double variance(std::span<const double> x) {
    if (x.size() < 2) throw EstimationError("variance needs at least two samples");
    const double m = mean(x);
    double s = 0.0;
    for (double v : x) s += (v - m) * (v - m);
    return s / static_cast<double>(x.size() - 1);
}

double quantile(std::vector<double> x, double q) {
    if (x.empty()) throw EstimationError("quantile of an empty sample");
    std::sort(x.begin(), x.end());
    const double h = (static_cast<double>(x.size()) - 1.0) * std::clamp(q, 0.0, 1.0);
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, x.size() - 1);
    return x[lo] + (h - static_cast<double>(lo)) * (x[hi] - x[lo]);
}

double kolmogorov_pvalue(double statistic, double n_effective) {
    const double sn = std::sqrt(n_effective);
    const double lambda = (sn + 0.12 + 0.11 / sn) * statistic;
    if (lambda < 1e-3) return 1.0;
    double sum = 0.0;
    for (int j = 1; j <= 100; ++j) {
        const double term = std::exp(-2.0 * j * j * lambda * lambda);
        sum += (j % 2 == 1 ? 2.0 : -2.0) * term;
        if (term < 1e-16) break;
    }
    return std::clamp(sum, 0.0, 1.0);
}

double effective_sample_size(std::span<const double> w) {
    double s = 0.0;
    double s2 = 0.0;
    for (double v : w) {
        s += v;
        s2 += v * v;
    }
    return s2 > 0.0 ? s * s / s2 : 0.0;
}

KsResult ks_two_sample_weighted(std::span<const double> a, std::span<const double> wa, std::span<const double> b,
                                std::span<const double> wb) {
    if (a.empty() || b.empty()) throw EstimationError("KS needs two non-empty samples");
    if (!wa.empty() && wa.size() != a.size()) throw DimensionMismatch(a.size(), wa.size(), "ks weights");
    if (!wb.empty() && wb.size() != b.size()) throw DimensionMismatch(b.size(), wb.size(), "ks weights");
    auto prepare = [](std::span<const double> x, std::span<const double> w) {
        std::vector<std::pair<double, double>> out(x.size());
        double total = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            out[i] = {x[i], w.empty() ? 1.0 : w[i]};
            total += out[i].second;
        }
        for (auto& p : out) p.second /= total;
        std::sort(out.begin(), out.end());
        return out;
    };
    const auto sa = prepare(a, wa);
    const auto sb = prepare(b, wb);
    double fa = 0.0;
    double fb = 0.0;
    double dmax = 0.0;
    std::size_t i = 0;
    std::size_t j = 0;
    while (i < sa.size() || j < sb.size()) {
        const double x = (j == sb.size() || (i < sa.size() && sa[i].first <= sb[j].first)) ? sa[i].first : sb[j].first;
        while (i < sa.size() && sa[i].first == x) fa += sa[i++].second;
        while (j < sb.size() && sb[j].first == x) fb += sb[j++].second;
        dmax = std::max(dmax, std::abs(fa - fb));
    }
    KsResult r;
    r.statistic = dmax;
    const double na = wa.empty() ? static_cast<double>(a.size()) : effective_sample_size(wa);
    const double nb = wb.empty() ? static_cast<double>(b.size()) : effective_sample_size(wb);
    r.n_effective = na * nb / (na + nb);
    r.p_value = kolmogorov_pvalue(dmax, r.n_effective);
    return r;
}

KsResult ks_two_sample(std::span<const double> a, std::span<const double> b) {
    return ks_two_sample_weighted(a, {}, b, {});
}

KsResult ks_uniform(std::span<const double> u) {
    if (u.empty()) throw EstimationError("KS needs a non-empty sample");
    std::vector<double> s(u.begin(), u.end());
    std::sort(s.begin(), s.end());
    const double n = static_cast<double>(s.size());
    double dmax = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        const double f = std::clamp(s[i], 0.0, 1.0);
        dmax = std::max({dmax, (static_cast<double>(i) + 1.0) / n - f, f - static_cast<double>(i) / n});
    }
    return {dmax, kolmogorov_pvalue(dmax, n), n};
}

EnergyTest energy_distance_test(std::span<const double> a, std::span<const double> b, std::size_t dim,
                                std::size_t permutations, std::uint64_t seed, std::size_t cap) {
    if (dim == 0 || a.size() % dim != 0 || b.size() % dim != 0) throw InvalidArgument("energy distance: bad shape");
    const std::size_t na = std::min(a.size() / dim, cap / 2);
    const std::size_t nb = std::min(b.size() / dim, cap / 2);
    if (na < 2 || nb < 2) throw EstimationError("energy distance needs at least two samples per side");
    const std::size_t n = na + nb;
    auto row = [&](std::size_t i) { return i < na ? a.data() + i * dim : b.data() + (i - na) * dim; };

    std::vector<float> dist(n * n, 0.0f);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            double s = 0.0;
            const double* p = row(i);
            const double* q = row(j);
            for (std::size_t k = 0; k < dim; ++k) s += (p[k] - q[k]) * (p[k] - q[k]);
            dist[i * n + j] = dist[j * n + i] = static_cast<float>(std::sqrt(s));
        }
    }
    double total = 0.0;
    for (float v : dist) total += v;

    std::vector<char> in_a(n, 0);
    auto statistic = [&](const std::vector<char>& label) {
        double s_aa = 0.0;
        double s_ab = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const float* r = dist.data() + i * n;
            float acc = 0.0f;
            double racc = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                acc += label[j] ? r[j] : 0.0f;
                if ((j & 255) == 255) {
                    racc += acc;
                    acc = 0.0f;
                }
            }
            racc += acc;
            if (label[i]) {
                s_aa += racc;
            } else {
                s_ab += racc;
            }
        }
        const double s_bb = total - 2.0 * s_ab - s_aa;
        const double da = static_cast<double>(na);
        const double db = static_cast<double>(nb);
        return 2.0 * s_ab / (da * db) - s_aa / (da * (da - 1.0)) - s_bb / (db * (db - 1.0));
    };

    for (std::size_t i = 0; i < na; ++i) in_a[i] = 1;
    EnergyTest out;
    out.n_a = na;
    out.n_b = nb;
    out.permutations = permutations;
    out.statistic = statistic(in_a);
    Philox4x32 rng(seed, 0x5045524dULL);
    std::size_t exceed = 0;
    std::vector<char> perm = in_a;
    for (std::size_t p = 0; p < permutations; ++p) {
        std::shuffle(perm.begin(), perm.end(), rng);
        if (statistic(perm) >= out.statistic) ++exceed;
    }
    out.p_value = static_cast<double>(exceed + 1) / static_cast<double>(permutations + 1);
    return out;
}

LinearFit fit_line(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw DimensionMismatch(x.size(), y.size(), "fit_line");
    if (x.size() < 2) throw EstimationError("line fit needs at least two points");
    const double mx = mean(x);
    const double my = mean(y);
    double sxx = 0.0;
    double sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx == 0.0) throw EstimationError("line fit needs distinct abscissae");
    LinearFit f;
    f.n = x.size();
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    if (x.size() > 2) {
        double rss = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double r = y[i] - f.intercept - f.slope * x[i];
            rss += r * r;
        }
        f.slope_se = std::sqrt(rss / static_cast<double>(x.size() - 2) / sxx);
    }
    return f;
}

LinearFit fit_line_weighted(std::span<const double> x, std::span<const double> y, std::span<const double> sigma) {
    if (x.size() != y.size() || x.size() != sigma.size()) throw DimensionMismatch(x.size(), y.size(), "fit_line");
    if (x.size() < 2) throw EstimationError("line fit needs at least two points");
    double sw = 0.0;
    double swx = 0.0;
    double swy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(sigma[i] > 0.0)) throw EstimationError("weighted fit needs positive standard deviations");
        const double w = 1.0 / (sigma[i] * sigma[i]);
        sw += w;
        swx += w * x[i];
        swy += w * y[i];
    }
    const double mx = swx / sw;
    const double my = swy / sw;
    double sxx = 0.0;
    double sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double w = 1.0 / (sigma[i] * sigma[i]);
        sxx += w * (x[i] - mx) * (x[i] - mx);
        sxy += w * (x[i] - mx) * (y[i] - my);
    }
    if (sxx == 0.0) throw EstimationError("line fit needs distinct abscissae");
    LinearFit f;
    f.n = x.size();
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    f.slope_se = std::sqrt(1.0 / sxx);
    return f;
}

}  // namespace srl
