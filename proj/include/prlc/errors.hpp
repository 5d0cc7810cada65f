#pragma once

#include <stdexcept>
#include <string>

namespace prlc {

// Numerical failure (factorization breakdown, quadrature non-convergence, ...).
// Carries diagnostics in what(); CLI maps this to exit code 3.
struct NumericalError : std::runtime_error {
    explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

// Stereographic projection evaluated at (or too close to) the excluded pole -e1.
struct PoleError : NumericalError {
    explicit PoleError(const std::string& msg) : NumericalError(msg) {}
};

// Kernel evaluated at r = 0, where it diverges.
struct SingularityError : NumericalError {
    explicit SingularityError(const std::string& msg) : NumericalError(msg) {}
};

// Cached chain energy drifted away from a full recomputation.
struct IntegrityError : NumericalError {
    explicit IntegrityError(const std::string& msg) : NumericalError(msg) {}
};

// Sink for non-fatal diagnostics (pole proximity counters, accuracy warnings).
struct Warnings {
    long pole_count = 0;
    bool accuracy_warning = false;
};

}  // namespace prlc
