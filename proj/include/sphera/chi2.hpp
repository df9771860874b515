// SPDX-License-Identifier: (Apache-2.0 OR MIT)
#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>

namespace sphera {

namespace detail {

// Regularized lower gamma P(a, x) by its power series; use for x < a + 1.
inline double gamma_p_series(double a, double x) {
    double term = 1.0 / a, sum = term;
    for (int n = 1; n < 100000; ++n) {
        term *= x / (a + n);
        sum += term;
        if (std::abs(term) < std::abs(sum) * 1e-17) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Regularized upper gamma Q(a, x) by the modified Lentz continued fraction; use for x >= a + 1.
inline double gamma_q_cf(double a, double x) {
    constexpr double tiny = 1e-300;
    double b = x + 1.0 - a, c = 1.0 / tiny, d = 1.0 / b, h = d;
    for (int i = 1; i < 100000; ++i) {
        double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < 1e-16) break;
    }
    return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

}  // namespace detail

// Regularized upper incomplete gamma Q(a, x).
inline double gamma_q(double a, double x) {
    if (!(a > 0.0)) throw std::domain_error("gamma_q: a must be > 0");
    if (!(x >= 0.0)) throw std::domain_error("gamma_q: x must be >= 0");
    if (x == 0.0) return 1.0;
    if (std::isinf(x)) return 0.0;
    if (x < a + 1.0) return 1.0 - detail::gamma_p_series(a, x);
    return detail::gamma_q_cf(a, x);
}

// Upper tail of the chi-squared distribution.
inline double chi2_sf(double x, int df) {
    if (df <= 0) throw std::domain_error("chi2_sf: df must be positive");
    if (std::isnan(x)) throw std::domain_error("chi2_sf: x is NaN");
    if (x <= 0.0) return 1.0;
    double q = gamma_q(0.5 * df, 0.5 * x);
    return q < 0.0 ? 0.0 : (q > 1.0 ? 1.0 : q);
}

}  // namespace sphera
