// SPDX-License-Identifier: (Apache-2.0 OR MIT)
#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "clebsch_gordan.hpp"
#include "coefficients.hpp"
#include "detail/parallel.hpp"
#include "error.hpp"
#include "geometry.hpp"
#include "harmonics.hpp"
#include "legendre.hpp"
#include "quadrature.hpp"
#include "wigner.hpp"

namespace sphera {

inline constexpr double conjugate_symmetry_tol = 1e-9;

namespace detail {

inline void require_complex(const HarmonicCoefficients& c, const char* who) {
    if (c.basis() != Basis::complex) throw std::invalid_argument(std::string(who) + ": complex basis required");
}

inline void require_conjugate_symmetric(const HarmonicCoefficients& c, const char* who) {
    double v = c.conjugate_symmetry_violation();
    if (v > conjugate_symmetry_tol)
        throw std::invalid_argument(std::string(who) + ": conjugate symmetry violated by " + std::to_string(v));
}

}  // namespace detail

// ---------------------------------------------------------------- evaluation

// Truncated series sum a_l^m Y_l^m(x). Throws if the imaginary residual exceeds 1e-9.
inline double evaluate(const HarmonicCoefficients& c, const UnitVector& x) {
    int L = c.max_degree();
    if (c.basis() == Basis::real) {
        std::vector<double> y(lm_count(L));
        real_sph_harm_all(L, x.theta(), x.phi(), y.data());
        double s = 0.0;
        for (std::size_t i = 0; i < y.size(); ++i) s += c.data()[i].real() * y[i];
        return s;
    }
    std::vector<cdouble> y(lm_count(L));
    sph_harm_all(L, x.theta(), x.phi(), y.data());
    cdouble s{};
    for (std::size_t i = 0; i < y.size(); ++i) s += c.data()[i] * y[i];
    if (std::abs(s.imag()) > conjugate_symmetry_tol)
        throw std::invalid_argument("evaluate: imaginary residual " + std::to_string(s.imag()) +
                                    " signals broken conjugate symmetry");
    return s.real();
}

inline std::vector<double> evaluate(const HarmonicCoefficients& c, const std::vector<UnitVector>& xs) {
    std::vector<double> out(xs.size());
    detail::parallel_for(xs.size(), [&](std::size_t i) { out[i] = evaluate(c, xs[i]); }, 64);
    return out;
}

// ---------------------------------------------------------------- projection

struct ProjectOptions {
    int n_theta = 0;  // 0: 2(L+1)
    int n_phi = 0;    // 0: 4(L+1)
};

struct Projection {
    HarmonicCoefficients coeffs;
    double a00_deviation = 0.0;         // |a_0^0 - 1/sqrt(4 pi)|
    bool normalization_warning = false;  // deviation above 1e-6
};

// a_l^m = int f conj(Y_l^m) dOmega for real f, by a product Gauss-Legendre x uniform-phi rule.
template <class F>
Projection project(F&& f, int L, ProjectOptions opt = {}) {
    if (L < 0) throw std::domain_error("project: negative degree");
    int nt = opt.n_theta > 0 ? opt.n_theta : 2 * (L + 1);
    int np = opt.n_phi > 0 ? opt.n_phi : 4 * (L + 1);
    const auto& q = gauss_legendre(nt);
    std::vector<double> cosv(static_cast<std::size_t>(np) * (L + 1)), sinv(cosv.size());
    for (int j = 0; j < np; ++j)
        for (int m = 0; m <= L; ++m) {
            // reduce m*j mod np so the angle stays small
            double a = two_pi * static_cast<double>((static_cast<long long>(m) * j) % np) / np;
            cosv[static_cast<std::size_t>(j) * (L + 1) + m] = std::cos(a);
            sinv[static_cast<std::size_t>(j) * (L + 1) + m] = std::sin(a);
        }
    std::size_t ntri = tri_index(L, L) + 1;
    std::vector<cdouble> partial(static_cast<std::size_t>(nt) * ntri);
    detail::parallel_for(static_cast<std::size_t>(nt), [&](std::size_t i) {
        double x = q.nodes[i], s = std::sqrt(std::max(0.0, 1.0 - x * x));
        double th = std::acos(x);
        std::vector<cdouble> fm(static_cast<std::size_t>(L) + 1);
        for (int j = 0; j < np; ++j) {
            double v = f(UnitVector::from_angles(th, two_pi * j / np));
            const double* cr = &cosv[static_cast<std::size_t>(j) * (L + 1)];
            const double* sr = &sinv[static_cast<std::size_t>(j) * (L + 1)];
            for (int m = 0; m <= L; ++m) fm[m] += cdouble(v * cr[m], -v * sr[m]);
        }
        std::vector<double> p(ntri);
        normalized_legendre_all(L, x, s, p.data());
        double w = q.weights[i] * two_pi / np;
        cdouble* out = &partial[i * ntri];
        for (int l = 0; l <= L; ++l)
            for (int m = 0; m <= l; ++m) out[tri_index(l, m)] = w * p[tri_index(l, m)] * fm[m];
    });
    Projection r{HarmonicCoefficients(L), 0.0, false};
    for (int l = 0; l <= L; ++l)
        for (int m = 0; m <= l; ++m) {
            cdouble acc{};
            for (int i = 0; i < nt; ++i) acc += partial[static_cast<std::size_t>(i) * ntri + tri_index(l, m)];
            r.coeffs(l, m) = acc;
            if (m > 0) r.coeffs(l, -m) = ((m % 2) ? -1.0 : 1.0) * std::conj(acc);
        }
    r.coeffs(0, 0) = r.coeffs(0, 0).real();
    r.a00_deviation = std::abs(r.coeffs(0, 0).real() - 1.0 / std::sqrt(four_pi));
    r.normalization_warning = r.a00_deviation > 1e-6;
    return r;
}

// Projection with grid doubling until successive results agree to `tol` (absolute, max entry).
template <class F>
Projection project_converged(F&& f, int L, double tol = 1e-12, int start_theta = 32, int max_theta = 4096) {
    int nt = std::max(2 * (L + 1), start_theta);
    Projection prev = project(f, L, {nt, 2 * nt});
    for (nt *= 2; nt <= max_theta; nt *= 2) {
        Projection cur = project(f, L, {nt, 2 * nt});
        if (cur.coeffs.max_abs_difference(prev.coeffs) < tol) return cur;
        prev = std::move(cur);
    }
    throw NumericalError("project: quadrature did not converge at " + std::to_string(max_theta) + " nodes");
}

// ---------------------------------------------------------------- bases

// Complex -> real: a_{l,0} = a_l^0, a_{l,k} = sqrt2 (-1)^k Re a_l^k, a_{l,-k} = -sqrt2 (-1)^k Im a_l^k.
inline HarmonicCoefficients to_real(const HarmonicCoefficients& c) {
    detail::require_complex(c, "to_real");
    detail::require_conjugate_symmetric(c, "to_real");
    HarmonicCoefficients r(c.max_degree(), Basis::real);
    for (int l = 0; l <= c.max_degree(); ++l) {
        r(l, 0) = c(l, 0).real();
        for (int k = 1; k <= l; ++k) {
            double f = (k % 2 ? -1.0 : 1.0) * std::numbers::sqrt2;
            r(l, k) = f * c(l, k).real();
            r(l, -k) = -f * c(l, k).imag();
        }
    }
    return r;
}

inline HarmonicCoefficients to_complex(const HarmonicCoefficients& r) {
    if (r.basis() != Basis::real) throw std::invalid_argument("to_complex: real basis required");
    if (r.max_imaginary() > conjugate_symmetry_tol)
        throw std::invalid_argument("to_complex: real-basis entries must be real");
    HarmonicCoefficients c(r.max_degree(), Basis::complex);
    for (int l = 0; l <= r.max_degree(); ++l) {
        c(l, 0) = r(l, 0).real();
        for (int k = 1; k <= l; ++k) {
            double s = k % 2 ? -1.0 : 1.0;
            cdouble a(s * r(l, k).real() / std::numbers::sqrt2, -s * r(l, -k).real() / std::numbers::sqrt2);
            c(l, k) = a;
            c(l, -k) = s * std::conj(a);
        }
    }
    return c;
}

// ---------------------------------------------------------------- rotation

// Coefficients of x -> f(g^{-1} x): b_l^k = sum_m a_l^m D^l_{k,m}(g).
inline HarmonicCoefficients rotate(const HarmonicCoefficients& c, const EulerAngles& g) {
    detail::require_complex(c, "rotate");
    HarmonicCoefficients out(c.max_degree());
    for (int l = 0; l <= c.max_degree(); ++l) {
        Eigen::MatrixXcd D = wigner_D_matrix(l, g);
        Eigen::VectorXcd a(2 * l + 1);
        for (int m = -l; m <= l; ++m) a(m + l) = c(l, m);
        Eigen::VectorXcd b = D * a;
        for (int k = -l; k <= l; ++k) out(l, k) = b(k + l);
    }
    return out;
}

// ---------------------------------------------------------------- products

// Coefficients of |sum b_l^m Y_l^m|^2 up to degree 2L via the Clebsch-Gordan series.
inline HarmonicCoefficients square_expand(const HarmonicCoefficients& b) {
    detail::require_complex(b, "square_expand");
    int L = b.max_degree();
    HarmonicCoefficients out(2 * L);
    for (int l1 = 0; l1 <= L; ++l1)
        for (int m1 = -l1; m1 <= l1; ++m1) {
            cdouble b1 = b(l1, m1);
            if (b1 == cdouble{}) continue;
            for (int l2 = 0; l2 <= L; ++l2)
                for (int m2 = -l2; m2 <= l2; ++m2) {
                    cdouble b2 = b(l2, m2);
                    if (b2 == cdouble{}) continue;
                    cdouble w = b1 * std::conj(b2) * ((m2 % 2) ? -1.0 : 1.0);
                    int M = m1 - m2;
                    for (int k = std::max(std::abs(l1 - l2), std::abs(M)); k <= l1 + l2; ++k) {
                        if ((l1 + l2 + k) % 2) continue;
                        double c0 = clebsch_gordan(l1, 0, l2, 0, k, 0);
                        double cm = clebsch_gordan(l1, m1, l2, -m2, k, M);
                        double f = std::sqrt((2.0 * l1 + 1.0) * (2.0 * l2 + 1.0) / (four_pi * (2.0 * k + 1.0)));
                        out(k, M) += w * f * c0 * cm;
                    }
                }
        }
    return out;
}

// ---------------------------------------------------------------- moments

struct InertiaSummary {
    Vec3 mean = Vec3::Zero();
    double resultant = 0.0;
    bool mean_defined = false;
    Mat3 inertia = Mat3::Zero();     // E[X X^T]
    Mat3 covariance = Mat3::Zero();  // E[X X^T] - mu mu^T
    bool has_inertia = false;
};

inline constexpr double mean_undefined_tol = 1e-10;

namespace detail {

inline HarmonicCoefficients as_real_basis(const HarmonicCoefficients& c) {
    return c.basis() == Basis::real ? c : to_real(c);
}

inline void fill_mean(InertiaSummary& s, const HarmonicCoefficients& r) {
    double f = std::sqrt(four_pi / 3.0);
    s.mean = f * Vec3(r.at(1, 1).real(), r.at(1, -1).real(), r.at(1, 0).real());
    s.resultant = s.mean.norm();
    s.mean_defined = s.resultant >= mean_undefined_tol;
}

}  // namespace detail

// Mean vector E[X] = sqrt(4pi/3) (a_{1,1}, a_{1,-1}, a_{1,0}) in the real basis.
inline InertiaSummary mean_direction(const HarmonicCoefficients& c) {
    if (c.max_degree() < 1) throw std::invalid_argument("mean_direction: degree >= 1 required");
    InertiaSummary s;
    detail::fill_mean(s, detail::as_real_basis(c));
    return s;
}

// E[X X^T] from the degree <= 2 real coefficients.
inline InertiaSummary inertia(const HarmonicCoefficients& c) {
    if (c.max_degree() < 2) throw std::invalid_argument("inertia: degree >= 2 required");
    HarmonicCoefficients r = detail::as_real_basis(c);
    InertiaSummary s;
    detail::fill_mean(s, r);
    auto a = [&](int l, int m) { return r(l, m).real(); };
    double total = std::sqrt(four_pi) * a(0, 0);  // E[1]
    double ezz = total / 3.0 + 2.0 / 3.0 * std::sqrt(four_pi / 5.0) * a(2, 0);
    double exy_diff = std::sqrt(16.0 * pi / 15.0) * a(2, 2);  // E[x^2 - y^2]
    double g = std::sqrt(four_pi / 15.0);
    double exx = 0.5 * (total - ezz) + 0.5 * exy_diff;
    double eyy = 0.5 * (total - ezz) - 0.5 * exy_diff;
    double exz = g * a(2, 1), eyz = g * a(2, -1), exy = g * a(2, -2);
    s.inertia << exx, exy, exz, exy, eyy, eyz, exz, eyz, ezz;
    s.covariance = s.inertia - s.mean * s.mean.transpose();
    s.has_inertia = true;
    return s;
}

// ---------------------------------------------------------------- symmetry patterns

enum class SymmetryKind { uniform, rotational_north, axial, equatorial, meridial };

struct SymmetryCheck {
    bool holds = false;
    double max_violation = 0.0;
};

// Exact coefficient pattern of each symmetry class. Meridial symmetry about the
// plane phi = phi0 means e^{i m phi0} a_l^m is real for every (l, m).
inline SymmetryCheck symmetry_pattern(const HarmonicCoefficients& c, SymmetryKind kind, double tol = 1e-8,
                                      double phi0 = 0.0) {
    detail::require_complex(c, "symmetry_pattern");
    double v = 0.0;
    for (int l = 0; l <= c.max_degree(); ++l)
        for (int m = -l; m <= l; ++m) {
            cdouble a = c(l, m);
            switch (kind) {
                case SymmetryKind::uniform:
                    if (l >= 1) v = std::max(v, std::abs(a));
                    break;
                case SymmetryKind::rotational_north:
                    if (m != 0) v = std::max(v, std::abs(a));
                    break;
                case SymmetryKind::axial:
                    if (l % 2 == 1) v = std::max(v, std::abs(a));
                    break;
                case SymmetryKind::equatorial:
                    if ((l + m) % 2 != 0) v = std::max(v, std::abs(a));
                    break;
                case SymmetryKind::meridial:
                    v = std::max(v, std::abs((std::polar(1.0, m * phi0) * a).imag()));
                    break;
            }
        }
    return {v <= tol, v};
}

}  // namespace sphera
