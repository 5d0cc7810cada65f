#include "prlc/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace prlc {

FitResult exp_mass_fit(const std::vector<double>& r, const std::vector<double>& y,
                       double power_correction) {
    const size_t n = r.size();
    if (n < 3 || y.size() != n) throw std::invalid_argument("exp_mass_fit: need >= 3 matching points");
    for (size_t i = 0; i < n; ++i) {
        if (y[i] <= 0.0) throw std::invalid_argument("exp_mass_fit: y must be positive");
        if (i > 0 && r[i] <= r[i - 1])
            throw std::invalid_argument("exp_mass_fit: r must be strictly increasing");
    }

    // z = log y + p log r, model z = A - m r
    std::vector<double> z(n);
    for (size_t i = 0; i < n; ++i) z[i] = std::log(y[i]) + power_correction * std::log(r[i]);

    double sr = 0.0, sz = 0.0, srr = 0.0, srz = 0.0;
    for (size_t i = 0; i < n; ++i) {
        sr += r[i];
        sz += z[i];
        srr += r[i] * r[i];
        srz += r[i] * z[i];
    }
    const double det = n * srr - sr * sr;
    const double slope = (n * srz - sr * sz) / det;
    const double intercept = (sz - slope * sr) / n;

    double rss = 0.0;
    for (size_t i = 0; i < n; ++i) {
        const double resid = z[i] - (intercept + slope * r[i]);
        rss += resid * resid;
    }
    const double sigma2 = (n > 2) ? rss / (n - 2) : 0.0;
    FitResult out;
    out.mass = -slope;
    out.log_amp = intercept;
    out.mass_se = std::sqrt(sigma2 * n / det);
    out.log_amp_se = std::sqrt(sigma2 * srr / det);
    out.residual_norm = std::sqrt(rss);
    return out;
}

NormalityReport normality_checks(const std::vector<double>& series) {
    const size_t n = series.size();
    if (n < 1000) throw std::invalid_argument("normality_checks: need n >= 1000");
    const double mean = std::accumulate(series.begin(), series.end(), 0.0) / n;
    double m2 = 0.0, m3 = 0.0, m4 = 0.0;
    for (double x : series) {
        const double c = x - mean;
        m2 += c * c;
        m3 += c * c * c;
        m4 += c * c * c * c;
    }
    m2 /= n;
    m3 /= n;
    m4 /= n;
    if (m2 <= 0.0) throw std::invalid_argument("normality_checks: constant series");

    const double skew = m3 / std::pow(m2, 1.5);
    const double kurt = m4 / (m2 * m2) - 3.0;

    std::vector<double> sorted(series);
    std::sort(sorted.begin(), sorted.end());
    const double sd = std::sqrt(m2);
    double ks = 0.0;
    for (size_t i = 0; i < n; ++i) {
        const double u = 0.5 * std::erfc(-(sorted[i] - mean) / (sd * std::sqrt(2.0)));
        ks = std::max(ks, std::max(std::abs(u - static_cast<double>(i) / n),
                                   std::abs(u - static_cast<double>(i + 1) / n)));
    }

    return {skew / std::sqrt(6.0 / n), kurt / std::sqrt(24.0 / n), ks, n};
}

double cap_cdf(double t, int n) {
    if (t <= -1.0) return 0.0;
    if (t >= 1.0) return 1.0;
    if (n == 1) {
        // density prop to (1-u^2)^{-1/2}
        return (std::asin(t) + 1.5707963267948966) / 3.14159265358979323846;
    }
    if (n == 3) {
        // density prop to (1-u^2)^{1/2}
        return 0.5 + (std::asin(t) + t * std::sqrt(1.0 - t * t)) / 3.14159265358979323846;
    }
    throw std::invalid_argument("cap_cdf: n must be 1 or 3");
}

CapReport cap_measure_test(const std::vector<double>& points_flat, int n) {
    if (n != 1 && n != 3) throw std::invalid_argument("cap_measure_test: n must be 1 or 3");
    const size_t stride = n + 1;
    if (points_flat.empty() || points_flat.size() % stride != 0)
        throw std::invalid_argument("cap_measure_test: flat array must have stride n+1");
    const size_t count = points_flat.size() / stride;

    std::vector<double> first(count);
    for (size_t i = 0; i < count; ++i) {
        double norm2 = 0.0;
        for (size_t k = 0; k < stride; ++k) {
            const double v = points_flat[i * stride + k];
            norm2 += v * v;
        }
        if (std::abs(norm2 - 1.0) > 1e-9)
            throw std::invalid_argument("cap_measure_test: points must be unit norm");
        first[i] = points_flat[i * stride];
    }
    std::sort(first.begin(), first.end());
    double ks = 0.0;
    for (size_t i = 0; i < count; ++i) {
        const double u = cap_cdf(first[i], n);
        ks = std::max(ks, std::max(std::abs(u - static_cast<double>(i) / count),
                                   std::abs(u - static_cast<double>(i + 1) / count)));
    }
    return {ks, count};
}

double ks_statistic_sorted(const std::vector<double>& sorted, double (*cdf)(double, int), int n) {
    const size_t count = sorted.size();
    double ks = 0.0;
    for (size_t i = 0; i < count; ++i) {
        const double u = cdf(sorted[i], n);
        ks = std::max(ks, std::max(std::abs(u - static_cast<double>(i) / count),
                                   std::abs(u - static_cast<double>(i + 1) / count)));
    }
    return ks;
}

}  // namespace prlc
