// SPDX-License-Identifier: (Apache-2.0 OR MIT)
#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "geometry.hpp"
#include "legendre.hpp"

namespace sphera {

using cdouble = std::complex<double>;

// Flat index of (l, m), -l <= m <= l.
constexpr std::size_t lm_index(int l, int m) {
    return static_cast<std::size_t>(l * (l + 1) + m);
}
constexpr std::size_t lm_count(int lmax) {
    return static_cast<std::size_t>((lmax + 1) * (lmax + 1));
}

inline void check_lm(const char* who, int l, int m) {
    if (l < 0) throw std::domain_error(std::string(who) + ": negative degree");
    if (m < -l || m > l) throw std::domain_error(std::string(who) + ": |m| > l");
}

// All complex Y_l^m at x for l <= lmax, written at lm_index(l, m).
inline void sph_harm_all(int lmax, double theta, double phi, cdouble* out) {
    thread_local std::vector<double> p;
    p.resize(tri_index(lmax, lmax) + 1);
    normalized_legendre_all(lmax, std::cos(theta), std::sin(theta), p.data());
    cdouble step = std::polar(1.0, phi);
    cdouble e{1.0, 0.0};
    for (int m = 0; m <= lmax; ++m) {
        // Re-anchor every few orders so drift in the power recurrence stays at rounding level.
        if (m % 8 == 0) e = std::polar(1.0, m * phi);
        double sign = (m % 2) ? -1.0 : 1.0;
        for (int l = m; l <= lmax; ++l) {
            cdouble y = p[tri_index(l, m)] * e;
            out[lm_index(l, m)] = y;
            if (m > 0) out[lm_index(l, -m)] = sign * std::conj(y);
        }
        e *= step;
    }
}

inline std::vector<cdouble> sph_harm_all(int lmax, const UnitVector& x) {
    std::vector<cdouble> out(lm_count(lmax));
    sph_harm_all(lmax, x.theta(), x.phi(), out.data());
    return out;
}

// Complex spherical harmonic Y_l^m with the Condon-Shortley phase.
inline cdouble sph_harm(int l, int m, const Angle& ang) {
    check_lm("sph_harm", l, m);
    int am = std::abs(m);
    std::vector<double> p(tri_index(l, l) + 1);
    normalized_legendre_all(l, std::cos(ang.theta), std::sin(ang.theta), p.data());
    cdouble y = p[tri_index(l, am)] * std::polar(1.0, am * ang.phi);
    if (m < 0) y = ((am % 2) ? -1.0 : 1.0) * std::conj(y);
    return y;
}

// Real harmonics: sqrt2 (-1)^m Re Y_l^m for m > 0, sqrt2 (-1)^m Im Y_l^|m| for m < 0.
// With this sign choice Y_{1,1}, Y_{1,-1}, Y_{1,0} are proportional to x, y, z.
inline void real_sph_harm_all(int lmax, double theta, double phi, double* out) {
    thread_local std::vector<double> p;
    p.resize(tri_index(lmax, lmax) + 1);
    normalized_legendre_all(lmax, std::cos(theta), std::sin(theta), p.data());
    for (int m = 0; m <= lmax; ++m) {
        double c = std::cos(m * phi), s = std::sin(m * phi);
        double f = (m % 2 ? -1.0 : 1.0) * std::numbers::sqrt2;
        for (int l = m; l <= lmax; ++l) {
            double v = p[tri_index(l, m)];
            if (m == 0) {
                out[lm_index(l, 0)] = v;
            } else {
                out[lm_index(l, m)] = f * v * c;
                out[lm_index(l, -m)] = f * v * s;
            }
        }
    }
}

inline std::vector<double> real_sph_harm_all(int lmax, const UnitVector& x) {
    std::vector<double> out(lm_count(lmax));
    real_sph_harm_all(lmax, x.theta(), x.phi(), out.data());
    return out;
}

inline double real_sph_harm(int l, int m, const Angle& ang) {
    check_lm("real_sph_harm", l, m);
    int am = std::abs(m);
    std::vector<double> p(tri_index(l, l) + 1);
    normalized_legendre_all(l, std::cos(ang.theta), std::sin(ang.theta), p.data());
    double v = p[tri_index(l, am)];
    if (m == 0) return v;
    double f = (am % 2 ? -1.0 : 1.0) * std::numbers::sqrt2 * v;
    return m > 0 ? f * std::cos(am * ang.phi) : f * std::sin(am * ang.phi);
}

}  // namespace sphera
