// SPDX-License-Identifier: (Apache-2.0 OR MIT)
#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "clebsch_gordan.hpp"
#include "coefficients.hpp"
#include "detail/parallel.hpp"
#include "expansion.hpp"
#include "harmonics.hpp"
#include "legendre.hpp"
#include "sampling.hpp"

namespace sphera {

struct CoefficientEstimate {
    HarmonicCoefficients coeffs;
    std::size_t n = 0;
    std::vector<double> mean_sq;  // (1/n) sum |Y_l^m(x_k)|^2 at lm_index(l, m)

    int max_degree() const { return coeffs.max_degree(); }

    // sqrt((E|Y|^2 - |a|^2) / n) with sample moments.
    double standard_error(int l, int m) const {
        double v = mean_sq[lm_index(l, m)] - std::norm(coeffs(l, m));
        return std::sqrt(std::max(v, 0.0) / static_cast<double>(n));
    }
};

// a_hat_l^m = (1/n) sum_k conj(Y_l^m(x_k)); summed in fixed blocks, reduced in block order.
inline CoefficientEstimate estimate_coeffs(const SampleSet& sample, int L) {
    if (sample.size() < 1) throw std::invalid_argument("estimate_coeffs: empty sample");
    if (L < 0) throw std::domain_error("estimate_coeffs: negative degree");
    std::size_t n = sample.size();
    std::size_t nlm = tri_index(L, L) + 1;
    std::size_t nb = (n + detail::reduction_block - 1) / detail::reduction_block;
    // Per block: re, im, |Y|^2 for each m >= 0 entry.
    std::vector<double> part(nb * nlm * 3, 0.0);
    detail::parallel_for(nb, [&](std::size_t b) {
        std::vector<double> p(nlm);
        std::vector<detail::CompensatedSum> acc(nlm * 3);
        std::size_t lo = b * detail::reduction_block, hi = std::min(n, lo + detail::reduction_block);
        for (std::size_t k = lo; k < hi; ++k) {
            const UnitVector& x = sample.points[k];
            normalized_legendre_all(L, x.z(), std::sin(x.theta()), p.data());
            for (int m = 0; m <= L; ++m) {
                double c = std::cos(m * x.phi()), s = std::sin(m * x.phi());
                for (int l = m; l <= L; ++l) {
                    std::size_t i = tri_index(l, m);
                    double v = p[i];
                    acc[3 * i].add(v * c);
                    acc[3 * i + 1].add(-v * s);
                    acc[3 * i + 2].add(v * v);
                }
            }
        }
        for (std::size_t i = 0; i < nlm * 3; ++i) part[b * nlm * 3 + i] = acc[i].value();
    });
    CoefficientEstimate est{HarmonicCoefficients(L), n, std::vector<double>(lm_count(L))};
    double inv = 1.0 / static_cast<double>(n);
    for (int l = 0; l <= L; ++l)
        for (int m = 0; m <= l; ++m) {
            std::size_t i = tri_index(l, m);
            detail::CompensatedSum re, im, sq;
            for (std::size_t b = 0; b < nb; ++b) {
                re.add(part[(b * nlm + i) * 3]);
                im.add(part[(b * nlm + i) * 3 + 1]);
                sq.add(part[(b * nlm + i) * 3 + 2]);
            }
            cdouble a(re.value() * inv, im.value() * inv);
            est.coeffs(l, m) = a;
            if (m > 0) est.coeffs(l, -m) = ((m % 2) ? -1.0 : 1.0) * std::conj(a);
            est.mean_sq[lm_index(l, m)] = est.mean_sq[lm_index(l, -m)] = sq.value() * inv;
        }
    // The constant harmonic is exact.
    est.coeffs(0, 0) = 1.0 / std::sqrt(four_pi);
    return est;
}

// Var P_l(X_3) = sum_{h=0}^{l} (C^{2h,0}_{l,0;l,0})^2 c_{2h} - c_l^2; needs c up to 2l.
inline double legendre_variance(int l, const std::vector<double>& c) {
    if (static_cast<int>(c.size()) < 2 * l + 1)
        throw std::invalid_argument("legendre_variance: c must extend to degree 2l");
    double s = 0.0;
    for (int h = 0; h <= l; ++h) {
        double cg = clebsch_gordan(l, 0, l, 0, 2 * h, 0);
        s += cg * cg * c[2 * h];
    }
    return s - c[l] * c[l];
}

struct RotationalEstimate {
    std::vector<double> c;               // c_hat_l, l = 0..L
    std::vector<double> std_error;       // sqrt(Var_hat / n)
    std::vector<double> population_std;  // plug-in std of P_l(X_3)
    std::size_t n = 0;
};

// c_hat_l = (1/n) sum P_l(cos theta_k) for a sample symmetric about the north pole.
inline RotationalEstimate estimate_c(const SampleSet& sample, int L) {
    if (sample.size() < 1) throw std::invalid_argument("estimate_c: empty sample");
    if (L < 0) throw std::domain_error("estimate_c: negative degree");
    int L2 = 2 * L;
    std::size_t n = sample.size();
    std::size_t nb = (n + detail::reduction_block - 1) / detail::reduction_block;
    std::vector<double> part(nb * (L2 + 1));
    detail::parallel_for(nb, [&](std::size_t b) {
        std::vector<double> p(L2 + 1);
        std::vector<detail::CompensatedSum> acc(L2 + 1);
        std::size_t lo = b * detail::reduction_block, hi = std::min(n, lo + detail::reduction_block);
        for (std::size_t k = lo; k < hi; ++k) {
            legendre_p_all(L2, sample.points[k].z(), p.data());
            for (int l = 0; l <= L2; ++l) acc[l].add(p[l]);
        }
        for (int l = 0; l <= L2; ++l) part[b * (L2 + 1) + l] = acc[l].value();
    });
    std::vector<double> c(L2 + 1);
    for (int l = 0; l <= L2; ++l) {
        detail::CompensatedSum s;
        for (std::size_t b = 0; b < nb; ++b) s.add(part[b * (L2 + 1) + l]);
        c[l] = s.value() / static_cast<double>(n);
    }
    c[0] = 1.0;
    RotationalEstimate r;
    r.n = n;
    for (int l = 0; l <= L; ++l) {
        double v = std::max(legendre_variance(l, c), 0.0);
        r.c.push_back(c[l]);
        r.population_std.push_back(std::sqrt(v));
        r.std_error.push_back(std::sqrt(v / static_cast<double>(n)));
    }
    return r;
}

// Sample mean vector and second-moment matrix.
inline InertiaSummary estimate_mean(const SampleSet& sample) {
    if (sample.size() < 1) throw std::invalid_argument("estimate_mean: empty sample");
    detail::CompensatedSum s[3], q[6];
    for (const auto& x : sample.points) {
        const Vec3& v = x.cartesian();
        for (int i = 0; i < 3; ++i) s[i].add(v(i));
        q[0].add(v.x() * v.x());
        q[1].add(v.y() * v.y());
        q[2].add(v.z() * v.z());
        q[3].add(v.x() * v.y());
        q[4].add(v.x() * v.z());
        q[5].add(v.y() * v.z());
    }
    double inv = 1.0 / static_cast<double>(sample.size());
    InertiaSummary r;
    r.mean = Vec3(s[0].value(), s[1].value(), s[2].value()) * inv;
    r.resultant = r.mean.norm();
    r.mean_defined = r.resultant >= mean_undefined_tol;
    r.inertia << q[0].value(), q[3].value(), q[4].value(), q[3].value(), q[1].value(), q[5].value(), q[4].value(),
        q[5].value(), q[2].value();
    r.inertia *= inv;
    r.covariance = r.inertia - r.mean * r.mean.transpose();
    r.has_inertia = true;
    return r;
}

// ---------------------------------------------------------------- covariance structure

enum class CovarianceMode { plugin, null_uniform, null_rotational };

namespace detail {

// E[conj(Y_{l1}^{m1}) Y_{l2}^{m2}] for a density with coefficients a(k, M):
// (-1)^{m1} sum_k sqrt((2l1+1)(2l2+1) / (4 pi (2k+1))) C^{k,0}_{l2,0;l1,0}
//   C^{k,m2-m1}_{l2,m2;l1,-m1} conj(a_k^{m2-m1}).
template <class A>
cdouble product_moment(A&& a, int l1, int m1, int l2, int m2) {
    int M = m2 - m1;
    cdouble s{};
    for (int k = std::max(std::abs(l1 - l2), std::abs(M)); k <= l1 + l2; ++k) {
        if ((l1 + l2 + k) % 2) continue;
        double c0 = clebsch_gordan(l2, 0, l1, 0, k, 0);
        if (c0 == 0.0) continue;
        double cm = clebsch_gordan(l2, m2, l1, -m1, k, M);
        if (cm == 0.0) continue;
        double f = std::sqrt((2.0 * l1 + 1.0) * (2.0 * l2 + 1.0) / (four_pi * (2.0 * k + 1.0)));
        s += f * c0 * cm * std::conj(a(k, M));
    }
    return ((m1 % 2) ? -1.0 : 1.0) * s;
}

// n Cov(a_hat_1, a_hat_2) = E[conj(Y_1) Y_2] - a_1 conj(a_2).
template <class A>
cdouble covariance_entry(A&& a, int l1, int m1, int l2, int m2) {
    return product_moment(a, l1, m1, l2, m2) - a(l1, m1) * std::conj(a(l2, m2));
}

}  // namespace detail

// Per-observation covariance n Cov(a_hat_{l1}^{m1}, a_hat_{l2}^{m2}) (conjugating the second).
// plugin uses the estimated coefficients, null_rotational keeps only the m = 0 ones,
// null_uniform returns the exact uniform value.
inline cdouble estimate_pair_covariance(const CoefficientEstimate& est, int l1, int m1, int l2, int m2,
                                        CovarianceMode mode) {
    check_lm("estimate_pair_covariance", l1, m1);
    check_lm("estimate_pair_covariance", l2, m2);
    if (mode == CovarianceMode::null_uniform) {
        if (l1 == 0 || l2 == 0) return 0.0;
        return (l1 == l2 && m1 == m2) ? cdouble(1.0 / four_pi) : cdouble{};
    }
    if (l1 + l2 > est.max_degree())
        throw std::invalid_argument("estimate_pair_covariance: needs coefficients to degree " +
                                    std::to_string(l1 + l2) + ", estimate has " +
                                    std::to_string(est.max_degree()));
    const auto& c = est.coeffs;
    if (mode == CovarianceMode::plugin)
        return detail::covariance_entry([&](int k, int M) { return c(k, M); }, l1, m1, l2, m2);
    return detail::covariance_entry([&](int k, int M) { return M == 0 ? c(k, 0) : cdouble{}; }, l1, m1, l2, m2);
}

}  // namespace sphera
