// SPDX-License-Identifier: (Apache-2.0 OR MIT)
#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "geometry.hpp"

namespace sphera {

// Legendre polynomial P_l(x) by the three-term recurrence.
inline double legendre_p(int l, double x) {
    if (l < 0) throw std::domain_error("legendre_p: negative degree");
    if (!(std::abs(x) <= 1.0)) throw std::domain_error("legendre_p: |x| > 1");
    if (l == 0) return 1.0;
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= l; ++k) {
        double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    return p1;
}

// P_0(x) .. P_lmax(x) into out (size lmax + 1).
inline void legendre_p_all(int lmax, double x, double* out) {
    out[0] = 1.0;
    if (lmax >= 1) out[1] = x;
    for (int k = 2; k <= lmax; ++k) out[k] = ((2 * k - 1) * x * out[k - 1] - (k - 1) * out[k - 2]) / k;
}

inline std::vector<double> legendre_p_all(int lmax, double x) {
    if (lmax < 0) throw std::domain_error("legendre_p_all: negative degree");
    if (!(std::abs(x) <= 1.0)) throw std::domain_error("legendre_p_all: |x| > 1");
    std::vector<double> out(static_cast<std::size_t>(lmax) + 1);
    legendre_p_all(lmax, x, out.data());
    return out;
}

// Triangular index of (l, m), 0 <= m <= l.
constexpr std::size_t tri_index(int l, int m) {
    return static_cast<std::size_t>(l) * (l + 1) / 2 + static_cast<std::size_t>(m);
}

// Fully normalized associated Legendre values, Condon-Shortley phase included,
// so that Y_l^m(theta, phi) = value(l, m) * exp(i m phi) for m >= 0.
// Normalization is folded into the recurrence; no factorials are formed.
inline void normalized_legendre_all(int lmax, double x, double s, double* out) {
    double pmm = std::sqrt(1.0 / four_pi);
    for (int m = 0; m <= lmax; ++m) {
        if (m > 0) pmm *= -std::sqrt((2.0 * m + 1.0) / (2.0 * m)) * s;
        out[tri_index(m, m)] = pmm;
        if (m == lmax) break;
        double p1 = x * std::sqrt(2.0 * m + 3.0) * pmm;
        out[tri_index(m + 1, m)] = p1;
        double p0 = pmm;
        for (int l = m + 2; l <= lmax; ++l) {
            double l2 = double(l) * l, m2 = double(m) * m, lm1 = l - 1.0;
            double a = std::sqrt((4.0 * l2 - 1.0) / (l2 - m2));
            double b = std::sqrt((lm1 * lm1 - m2) / (4.0 * lm1 * lm1 - 1.0));
            double p2 = a * (x * p1 - b * p0);
            out[tri_index(l, m)] = p2;
            p0 = p1;
            p1 = p2;
        }
    }
}

inline std::vector<double> normalized_legendre_all(int lmax, double theta) {
    std::vector<double> out(tri_index(lmax, lmax) + 1);
    normalized_legendre_all(lmax, std::cos(theta), std::sin(theta), out.data());
    return out;
}

}  // namespace sphera
