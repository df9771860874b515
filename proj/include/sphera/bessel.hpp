// SPDX-License-Identifier: (Apache-2.0 OR MIT)
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "geometry.hpp"

namespace sphera {

// Spherical Bessel j_l(z) = sqrt(pi / 2z) J_{l+1/2}(z).
inline double sph_bessel_j(int l, double z) {
    if (l < 0) throw std::domain_error("sph_bessel_j: negative degree");
    if (!(z >= 0.0)) throw std::domain_error("sph_bessel_j: z < 0");
    if (z == 0.0) return l == 0 ? 1.0 : 0.0;
    return std::sph_bessel(static_cast<unsigned>(l), z);
}

// Ratios r_l = I_{l+1/2}(kappa) / I_{1/2}(kappa) for l = 0..lmax.
// Successive ratios I_{j+1/2}/I_{j-1/2} come from the backward recurrence
// rho_j = 1 / ((2j+1)/kappa + rho_{j+1}), which is stable for all kappa > 0.
inline std::vector<double> bessel_i_half_ratios(int lmax, double kappa) {
    if (lmax < 0) throw std::domain_error("bessel_i_half_ratios: negative degree");
    if (!(kappa >= 0.0)) throw std::domain_error("bessel_i_half_ratios: kappa < 0");
    std::vector<double> r(static_cast<std::size_t>(lmax) + 1, 0.0);
    r[0] = 1.0;
    if (kappa == 0.0 || lmax == 0) return r;
    int start = lmax + 60 + static_cast<int>(std::min(kappa, 1e6));
    std::vector<double> rho(static_cast<std::size_t>(lmax) + 1, 0.0);
    double cur = 0.0;
    for (int j = start; j >= 1; --j) {
        cur = 1.0 / ((2.0 * j + 1.0) / kappa + cur);
        if (j <= lmax) rho[static_cast<std::size_t>(j)] = cur;
    }
    for (int l = 1; l <= lmax; ++l) r[l] = r[l - 1] * rho[l];
    return r;
}

// log I_{l+1/2}(kappa); finite for every kappa > 0 that fits in a double.
inline double log_bessel_i_half(int l, double kappa) {
    if (l < 0) throw std::domain_error("log_bessel_i_half: negative degree");
    if (!(kappa > 0.0)) throw std::domain_error("log_bessel_i_half: kappa must be > 0");
    // log I_{1/2} = 0.5 log(2 / (pi kappa)) + log sinh kappa
    double log_sinh = kappa < 20.0 ? std::log(std::sinh(kappa))
                                   : kappa + std::log1p(-std::exp(-2.0 * kappa)) - std::log(2.0);
    double out = 0.5 * std::log(2.0 / (pi * kappa)) + log_sinh;
    if (l == 0) return out;
    // Product of ratios in log space so small kappa / large l does not underflow.
    int start = l + 60 + static_cast<int>(std::min(kappa, 1e6));
    double cur = 0.0, acc = 0.0;
    for (int j = start; j >= 1; --j) {
        cur = 1.0 / ((2.0 * j + 1.0) / kappa + cur);
        if (j <= l) acc += std::log(cur);
    }
    return out + acc;
}

// I_{l+1/2}(kappa); throws std::overflow_error when the value is not representable.
inline double bessel_i_half(int l, double kappa) {
    double v = std::exp(log_bessel_i_half(l, kappa));
    if (!std::isfinite(v)) throw std::overflow_error("bessel_i_half: result overflows; use log_bessel_i_half");
    return v;
}

// Mean resultant of vMF(kappa): coth(kappa) - 1/kappa.
inline double vmf_mean_resultant(double kappa) {
    if (!(kappa >= 0.0)) throw std::domain_error("vmf_mean_resultant: kappa < 0");
    if (kappa < 1e-3) {
        double k2 = kappa * kappa;
        return kappa / 3.0 * (1.0 - k2 / 15.0 + 2.0 * k2 * k2 / 315.0);
    }
    return 1.0 / std::tanh(kappa) - 1.0 / kappa;
}

}  // namespace sphera
