#include <doctest.h>

#include <cmath>

#include "prlc/rng.hpp"
#include "prlc/stats.hpp"

using namespace prlc;

TEST_CASE("exp_mass_fit") {
    SUBCASE("exact log-linear data") {
        std::vector<double> r, y;
        for (int k = 1; k <= 20; ++k) {
            r.push_back(k);
            y.push_back(5.0 * std::exp(-0.7 * k));
        }
        const FitResult fit = exp_mass_fit(r, y, 0.0);
        CHECK(fit.mass == doctest::Approx(0.7).epsilon(1e-10));
        CHECK(fit.log_amp == doctest::Approx(std::log(5.0)).epsilon(1e-10));
        CHECK(fit.residual_norm < 1e-10);
    }

    SUBCASE("power correction removes the r^{-1/2} prefactor") {
        std::vector<double> r, y;
        for (int k = 1; k <= 20; ++k) {
            r.push_back(k);
            y.push_back(std::pow(k, -0.5) * std::exp(-0.7 * k));
        }
        const FitResult fit = exp_mass_fit(r, y, 0.5);
        CHECK(fit.mass == doctest::Approx(0.7).epsilon(1e-10));
    }

    SUBCASE("amplitude invariance") {
        std::vector<double> r, y, y2;
        Rng rng(7);
        for (int k = 1; k <= 15; ++k) {
            r.push_back(k);
            const double v = std::exp(-0.4 * k) * (1.0 + 0.01 * rng.normal());
            y.push_back(v);
            y2.push_back(13.7 * v);
        }
        const FitResult a = exp_mass_fit(r, y, 0.0);
        const FitResult b = exp_mass_fit(r, y2, 0.0);
        CHECK(a.mass == doctest::Approx(b.mass).epsilon(1e-12));
        CHECK(b.log_amp == doctest::Approx(a.log_amp + std::log(13.7)).epsilon(1e-10));
    }

    SUBCASE("coverage study: ~95% of fits within 2 standard errors") {
        int covered = 0;
        const int n_seeds = 500;
        for (int seed = 0; seed < n_seeds; ++seed) {
            Rng rng(1000 + seed);
            std::vector<double> r, y;
            for (int k = 2; k <= 20; k += 2) {
                r.push_back(k);
                y.push_back(std::exp(-0.7 * k) * (1.0 + 0.01 * rng.normal()));
            }
            const FitResult fit = exp_mass_fit(r, y, 0.0);
            if (std::abs(fit.mass - 0.7) <= 2.0 * fit.mass_se) covered++;
        }
        const double cov = static_cast<double>(covered) / n_seeds;
        CHECK(cov >= 0.92);
        CHECK(cov <= 0.99);
    }

    SUBCASE("input validation") {
        CHECK_THROWS_AS(exp_mass_fit({1, 2}, {1, 1}, 0.0), std::invalid_argument);
        CHECK_THROWS_AS(exp_mass_fit({1, 2, 3}, {1.0, -1.0, 1.0}, 0.0), std::invalid_argument);
        CHECK_THROWS_AS(exp_mass_fit({1, 3, 2}, {1.0, 1.0, 1.0}, 0.0), std::invalid_argument);
    }
}

TEST_CASE("normality_checks") {
    SUBCASE("gaussian data passes") {
        Rng rng(17);
        std::vector<double> x(100000);
        for (auto& v : x) v = 3.0 + 2.0 * rng.normal();
        const NormalityReport rep = normality_checks(x);
        CHECK(std::abs(rep.skew_z) <= 4.0);
        CHECK(std::abs(rep.kurt_z) <= 4.0);
        CHECK(rep.ks_stat <= 0.006);
    }
    SUBCASE("exponential data fails on skewness") {
        Rng rng(19);
        std::vector<double> x(100000);
        for (auto& v : x) v = -std::log(rng.uniform());
        const NormalityReport rep = normality_checks(x);
        CHECK(std::abs(rep.skew_z) > 10.0);
    }
    SUBCASE("input validation") {
        CHECK_THROWS_AS(normality_checks(std::vector<double>(500, 1.0)), std::invalid_argument);
        CHECK_THROWS_AS(normality_checks(std::vector<double>(2000, 1.0)), std::invalid_argument);
    }
}

TEST_CASE("cap_cdf") {
    CHECK(cap_cdf(1.0, 3) == 1.0);
    CHECK(cap_cdf(-1.0, 3) == 0.0);
    CHECK(cap_cdf(0.0, 3) == doctest::Approx(0.5));
    CHECK(cap_cdf(0.0, 1) == doctest::Approx(0.5));
    // n=3, t=0.5: (arcsin t + t sqrt(1-t^2))/pi + 1/2 = 0.8044988905...
    CHECK(cap_cdf(0.5, 3) == doctest::Approx(0.804498890522115).epsilon(1e-12));
    // quadrature cross-check of the antiderivative; substituting u = sin(phi)
    // removes the endpoint singularity of the n = 1 density
    for (int n : {1, 3})
        for (double t : {-0.7, -0.2, 0.3, 0.9}) {
            const int steps = 200000;
            const double half_pi = 1.5707963267948966;
            double acc = 0.0, total = 0.0;
            for (int i = 0; i < steps; ++i) {
                const double phi = -half_pi + 2.0 * half_pi * (i + 0.5) / steps;
                const double w = std::pow(std::cos(phi), n - 1);  // (1-u^2)^{(n-2)/2} du
                total += w;
                if (std::sin(phi) <= t) acc += w;
            }
            CHECK(cap_cdf(t, n) == doctest::Approx(acc / total).epsilon(2e-5));
        }
    CHECK_THROWS_AS(cap_cdf(0.0, 2), std::invalid_argument);
}

TEST_CASE("cap_measure_test") {
    Rng rng(23);
    const size_t n = 50000;
    std::vector<double> flat;
    flat.reserve(4 * n);
    std::vector<double> rotated;
    rotated.reserve(4 * n);
    const double c = std::cos(0.9), s = std::sin(0.9);
    for (size_t i = 0; i < n; ++i) {
        double q[4] = {rng.normal(), rng.normal(), rng.normal(), rng.normal()};
        double norm = std::sqrt(q[0] * q[0] + q[1] * q[1] + q[2] * q[2] + q[3] * q[3]);
        for (auto& v : q) v /= norm;
        flat.insert(flat.end(), {q[0], q[1], q[2], q[3]});
        // rotate about the first axis (in the (2,3) plane)
        rotated.insert(rotated.end(), {q[0], c * q[1] - s * q[2], s * q[1] + c * q[2], q[3]});
    }
    const CapReport a = cap_measure_test(flat, 3);
    const CapReport b = cap_measure_test(rotated, 3);
    CHECK(a.ks_stat == doctest::Approx(b.ks_stat).epsilon(1e-12));  // exactly invariant
    CHECK(a.ks_stat < 0.01);

    std::vector<double> bad = {2.0, 0.0, 0.0, 0.0};
    CHECK_THROWS_AS(cap_measure_test(bad, 3), std::invalid_argument);
    CHECK_THROWS_AS(cap_measure_test(flat, 2), std::invalid_argument);
}
