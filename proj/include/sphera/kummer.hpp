// SPDX-License-Identifier: (Apache-2.0 OR MIT)
#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "geometry.hpp"

namespace sphera {

// log M(1/2, 3/2, gamma), where M(1/2, 3/2, gamma) = int_0^1 exp(gamma t^2) dt.
inline double log_kummer_m(double gamma) {
    if (!std::isfinite(gamma)) throw std::domain_error("kummer_m: gamma not finite");
    if (gamma == 0.0) return 0.0;
    if (gamma < 0.0) {
        double s = std::sqrt(-gamma);
        return std::log(std::sqrt(pi) * std::erf(s) / (2.0 * s));
    }
    // Series sum_k gamma^k / (k! (2k+1)), evaluated with the largest term factored out.
    double lg = std::log(gamma);
    int kmax = static_cast<int>(gamma + 40.0 * std::sqrt(gamma) + 60.0);
    double peak = -INFINITY;
    for (int k = 0; k <= kmax; ++k) {
        double t = k * lg - std::lgamma(k + 1.0) - std::log(2.0 * k + 1.0);
        peak = std::max(peak, t);
    }
    double sum = 0.0;
    for (int k = 0; k <= kmax; ++k) {
        double t = k * lg - std::lgamma(k + 1.0) - std::log(2.0 * k + 1.0);
        sum += std::exp(t - peak);
    }
    return peak + std::log(sum);
}

inline double kummer_m(double gamma) {
    if (!std::isfinite(gamma)) throw std::domain_error("kummer_m: gamma not finite");
    if (gamma == 0.0) return 1.0;
    if (gamma < 0.0) {
        double s = std::sqrt(-gamma);
        return std::sqrt(pi) * std::erf(s) / (2.0 * s);
    }
    double v = std::exp(log_kummer_m(gamma));
    if (!std::isfinite(v)) throw std::overflow_error("kummer_m: result overflows; use log_kummer_m");
    return v;
}

}  // namespace sphera
