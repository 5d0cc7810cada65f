#include "prlc/mcmc.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace prlc {

Diagnostics diagnostics(const std::vector<double>& series) {
    const size_t n = series.size();
    if (n < 100) throw std::invalid_argument("diagnostics: need at least 100 samples");
    const double mean = std::accumulate(series.begin(), series.end(), 0.0) / n;
    std::vector<double> centered(n);
    for (size_t t = 0; t < n; ++t) centered[t] = series[t] - mean;

    auto gamma = [&](size_t k) {
        double acc = 0.0;
        for (size_t t = 0; t + k < n; ++t) acc += centered[t] * centered[t + k];
        return acc / n;
    };
    const double g0 = gamma(0);
    if (g0 <= 0.0) throw std::invalid_argument("diagnostics: constant series");

    // Geyer initial positive sequence: sum Gamma_m = rho_{2m} + rho_{2m+1}
    // while positive; tau = 2 * sum Gamma_m - 1.
    double sum = 0.0;
    const size_t mmax = std::min(n / 2 - 1, static_cast<size_t>(5000));
    for (size_t m = 0; m <= mmax; ++m) {
        const double G = (gamma(2 * m) + gamma(2 * m + 1)) / g0;
        if (G <= 0.0) break;
        sum += G;
    }
    double tau = 2.0 * sum - 1.0;
    tau = std::max(tau, 1e-3);
    return {tau, static_cast<double>(n) / tau};
}

SeriesStats series_stats(const std::vector<double>& series) {
    const Diagnostics d = diagnostics(series);
    const size_t n = series.size();
    const double mean = std::accumulate(series.begin(), series.end(), 0.0) / n;
    double var = 0.0;
    for (double x : series) var += (x - mean) * (x - mean);
    var /= (n - 1);
    const double se = std::sqrt(var * d.tau / n);
    return {mean, se, d.tau, d.ess};
}

}  // namespace prlc
