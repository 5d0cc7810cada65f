#include "prlc/group.hpp"

#include <cmath>
#include <string>

namespace prlc {

void stereo_lift(const double* x, int n, double* out) {
    double n2 = 0.0;
    for (int k = 0; k < n; ++k) n2 += x[k] * x[k];
    const double denom = 4.0 + n2;
    out[0] = (4.0 - n2) / denom;
    for (int k = 0; k < n; ++k) out[k + 1] = 4.0 * x[k] / denom;
}

void stereo_project(const double* s, int n, double* out) {
    // distance to the pole -e1
    double dp = (s[0] + 1.0) * (s[0] + 1.0);
    for (int k = 1; k <= n; ++k) dp += s[k] * s[k];
    if (std::sqrt(dp) < kPoleEps)
        throw PoleError("stereo_project: input within " + std::to_string(kPoleEps) +
                        " of the pole -e1");
    const double c = 2.0 / (1.0 + s[0]);
    for (int k = 0; k < n; ++k) out[k] = c * s[k + 1];
}

double stereo_logweight(const double* x, int n) {
    double n2 = 0.0;
    for (int k = 0; k < n; ++k) n2 += x[k] * x[k];
    return -n * std::log(4.0 + n2);
}

}  // namespace prlc
