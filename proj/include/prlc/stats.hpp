#pragma once

#include <cstddef>
#include <vector>

#include "prlc/errors.hpp"

namespace prlc {

struct FitResult {
    double mass;           // fitted decay rate m (slope is -m)
    double log_amp;        // fitted log-amplitude
    double mass_se;        // standard errors from the least-squares fit
    double log_amp_se;
    double residual_norm;
};

// Least squares of log(y) + power_correction * log(r) against A - m r.
FitResult exp_mass_fit(const std::vector<double>& r, const std::vector<double>& y,
                       double power_correction);

struct NormalityReport {
    double skew_z;      // skewness / sqrt(6/n)
    double kurt_z;      // excess kurtosis / sqrt(24/n)
    double ks_stat;     // KS distance to the normal with matched mean/variance
    std::size_t n;
};

// Moment z-scores and KS statistic against the fitted normal. Requires
// n >= 1000 and a non-constant series.
NormalityReport normality_checks(const std::vector<double>& series);

// Exact CDF of the first coordinate of a uniform point on S^n:
// integral of (1-u^2)^{(n-2)/2}, normalized. n in {1, 3}.
double cap_cdf(double t, int n);

struct CapReport {
    double ks_stat;
    std::size_t n;
};

// KS distance between the empirical law of the first coordinate of unit-norm
// points (flat array, stride n+1) and the exact cap CDF.
CapReport cap_measure_test(const std::vector<double>& points_flat, int n);

// KS distance between sorted samples and an arbitrary CDF (helper).
double ks_statistic_sorted(const std::vector<double>& sorted, double (*cdf)(double, int), int n);

}  // namespace prlc
