// SPDX-License-Identifier: (Apache-2.0 OR MIT)
#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "chi2.hpp"
#include "coefficients.hpp"
#include "estimation.hpp"
#include "expansion.hpp"
#include "geometry.hpp"
#include "sampling.hpp"

namespace sphera {

struct TestReport {
    std::string test;
    int L = 0;
    double statistic = 0.0;
    int df = 0;
    double p_value = 1.0;
    double alpha = 0.05;
    bool reject = false;
    std::vector<double> components;
    std::vector<std::string> notes;
};

// One real entry of a stacked statistic: Re or Im of e^{i phase} a_l^m.
struct Component {
    int l = 0;
    int m = 0;
    bool imag = false;
    double phase = 0.0;
};

enum class RotationalMode { full, diagonal };
enum class MeridialMode { joint, diagonal };

inline constexpr double pinv_condition_limit = 1e12;
inline constexpr double pinv_rel_cutoff = 1e-10;

// ---------------------------------------------------------------- stacks

// Rotational symmetry about N: a_l^m, 1 <= m <= l <= L (full) or a_l^l only (diagonal).
inline std::vector<Component> rotational_stack(int L, RotationalMode mode = RotationalMode::full) {
    std::vector<Component> s;
    for (int l = 1; l <= L; ++l)
        for (int m = (mode == RotationalMode::full ? 1 : l); m <= l; ++m) {
            s.push_back({l, m, false});
            s.push_back({l, m, true});
        }
    return s;
}

// Odd degrees 1, 3, ..., 2L+1. Conjugate-symmetric stack: m = 0 contributes its real
// part, m > 0 both parts, so a degree-h block has 2h + 1 free real components.
inline std::vector<Component> axial_stack(int L) {
    std::vector<Component> s;
    for (int h = 1; h <= 2 * L + 1; h += 2)
        for (int m = 0; m <= h; ++m) {
            s.push_back({h, m, false});
            if (m > 0) s.push_back({h, m, true});
        }
    return s;
}

// a_{2l+1}^{2m} and a_{2l}^{2m+1}: every (h, m) with h + m odd, h <= 2L + 1.
inline std::vector<Component> equatorial_stack(int L) {
    std::vector<Component> s;
    for (int h = 1; h <= 2 * L + 1; ++h)
        for (int m = (h % 2 == 1 ? 0 : 1); m <= h; m += 2) {
            s.push_back({h, m, false});
            if (m > 0) s.push_back({h, m, true});
        }
    return s;
}

// t_l^m = Im(e^{i m (phi0 + pi)} a_l^m), 1 <= m <= l <= L.
inline std::vector<Component> meridial_stack(int L, double phi0) {
    std::vector<Component> s;
    for (int l = 1; l <= L; ++l)
        for (int m = 1; m <= l; ++m) s.push_back({l, m, true, m * (phi0 + pi)});
    return s;
}

inline std::vector<double> component_values(const HarmonicCoefficients& c, const std::vector<Component>& stack) {
    std::vector<double> v;
    v.reserve(stack.size());
    for (const auto& e : stack) {
        cdouble z = std::polar(1.0, e.phase) * c.at(e.l, e.m);
        v.push_back(e.imag ? z.imag() : z.real());
    }
    return v;
}

// ---------------------------------------------------------------- covariance of a stack

// Per-observation covariance of the stacked real components when the data follow
// a density with coefficients a(k, M). Built from
//   G = n E[z_i conj z_j] and P = n E[z_i z_j], with z_i = e^{i phase_i} a_hat_i:
//   Cov(Re, Re) = Re(G + P)/2, Cov(Im, Im) = Re(G - P)/2,
//   Cov(Im_i, Re_j) = Im(G + P)/2, Cov(Re_i, Im_j) = Im(P - G)/2.
template <class A>
Eigen::MatrixXd stack_covariance(A&& a, const std::vector<Component>& stack) {
    std::size_t k = stack.size();
    Eigen::MatrixXd s(k, k);
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = i; j < k; ++j) {
            const auto& ci = stack[i];
            const auto& cj = stack[j];
            cdouble wi = std::polar(1.0, ci.phase), wj = std::polar(1.0, cj.phase);
            cdouble g = wi * std::conj(wj) * detail::covariance_entry(a, ci.l, ci.m, cj.l, cj.m);
            cdouble p = wi * wj * ((cj.m % 2) ? -1.0 : 1.0) * detail::covariance_entry(a, ci.l, ci.m, cj.l, -cj.m);
            double v;
            if (!ci.imag && !cj.imag) v = 0.5 * (g + p).real();
            else if (ci.imag && cj.imag) v = 0.5 * (g - p).real();
            else if (ci.imag) v = 0.5 * (g + p).imag();
            else v = 0.5 * (p - g).imag();
            s(i, j) = s(j, i) = v;
        }
    return s;
}

struct QuadraticForm {
    double statistic = 0.0;
    int rank = 0;
    double condition = 1.0;
    bool pseudo_inverse = false;
};

// n v^T S^+ v. Full inverse when cond(S) <= 1e12; otherwise eigenvalues below
// 1e-10 * max are dropped and the rank shrinks accordingly.
inline QuadraticForm quadratic_form(const std::vector<double>& v, const Eigen::MatrixXd& cov, std::size_t n) {
    QuadraticForm q;
    int k = static_cast<int>(v.size());
    if (k == 0) return q;
    Eigen::MatrixXd s = 0.5 * (cov + cov.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s);
    const auto& lam = es.eigenvalues();
    double top = lam.maxCoeff();
    if (!(top > 0.0)) return q;
    double low = lam.minCoeff();
    q.condition = low > 0.0 ? top / low : INFINITY;
    double cut = q.condition <= pinv_condition_limit ? 0.0 : pinv_rel_cutoff * top;
    q.pseudo_inverse = cut > 0.0;
    Eigen::VectorXd x = Eigen::Map<const Eigen::VectorXd>(v.data(), k);
    Eigen::VectorXd y = es.eigenvectors().transpose() * x;
    double stat = 0.0;
    for (int i = 0; i < k; ++i)
        if (lam(i) > cut) {
            stat += y(i) * y(i) / lam(i);
            ++q.rank;
        }
    q.statistic = static_cast<double>(n) * stat;
    return q;
}

namespace detail {

inline void finish(TestReport& r) {
    r.p_value = r.df > 0 ? chi2_sf(r.statistic, r.df) : 1.0;
    r.reject = r.p_value < r.alpha;
}

inline void note_sample_size(TestReport& r, std::size_t n) {
    if (n < static_cast<std::size_t>(30 * std::max(r.L, 1)))
        r.notes.push_back("n = " + std::to_string(n) + " is below the asymptotic floor 30 L");
}

inline std::string fmt_g(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

template <class A>
void stacked_test(TestReport& r, const HarmonicCoefficients& est, A&& null_coeffs, const std::vector<Component>& stack,
                  std::size_t n) {
    r.components = component_values(est, stack);
    Eigen::MatrixXd cov = stack_covariance(null_coeffs, stack);
    QuadraticForm q = quadratic_form(r.components, cov, n);
    r.statistic = q.statistic;
    r.df = q.rank;
    if (q.pseudo_inverse)
        r.notes.push_back("covariance condition number " + fmt_g(q.condition) +
                          " above 1e12; pseudo-inverse used, df reduced from " + std::to_string(stack.size()) + " to " +
                          std::to_string(q.rank));
}

inline void check_args(const SampleSet& s, int L, double alpha, const char* who) {
    if (s.size() < 1) throw std::invalid_argument(std::string(who) + ": empty sample");
    if (L < 1) throw std::invalid_argument(std::string(who) + ": L must be >= 1");
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument(std::string(who) + ": alpha must lie in (0, 1)");
}

}  // namespace detail

// ---------------------------------------------------------------- tests

// 4 pi n sum_{l=1}^{L} sum_m |a_hat_l^m|^2 ~ chi2_{L(L+2)} under uniformity.
inline TestReport test_uniformity(const SampleSet& sample, int L, double alpha = 0.05) {
    detail::check_args(sample, L, alpha, "test_uniformity");
    TestReport r;
    r.test = "uniform";
    r.L = L;
    r.alpha = alpha;
    auto est = estimate_coeffs(sample, L);
    HarmonicCoefficients real = to_real(est.coeffs);
    double s = 0.0;
    for (int l = 1; l <= L; ++l)
        for (int m = -l; m <= l; ++m) {
            s += std::norm(est.coeffs(l, m));
            r.components.push_back(real(l, m).real());
        }
    r.statistic = four_pi * static_cast<double>(sample.size()) * s;
    r.df = L * (L + 2);
    detail::note_sample_size(r, sample.size());
    detail::finish(r);
    return r;
}

inline SampleSet rotate_sample(const SampleSet& s, const Mat3& rot) {
    SampleSet out;
    out.seed = s.seed;
    out.model = s.model;
    out.points.reserve(s.size());
    for (const auto& x : s.points) out.points.push_back(rotate(rot, x));
    return out;
}

// Rotational symmetry about `axis`; the sample is first rotated so that axis -> N.
// Null covariance uses the plug-in c_hat_k, k <= 2L.
inline TestReport test_rotational(const SampleSet& sample, const UnitVector& axis, int L, double alpha = 0.05,
                                  RotationalMode mode = RotationalMode::full) {
    detail::check_args(sample, L, alpha, "test_rotational");
    TestReport r;
    r.test = "rotational";
    r.L = L;
    r.alpha = alpha;
    SampleSet rs = rotate_sample(sample, rotation_to_north(axis));
    auto est = estimate_coeffs(rs, 2 * L);
    const auto& c = est.coeffs;
    auto null = [&](int k, int M) { return M == 0 ? c(k, 0) : cdouble{}; };
    detail::stacked_test(r, c, null, rotational_stack(L, mode), rs.size());
    if (mode == RotationalMode::diagonal) r.notes.push_back("diagonal mode: only a_l^l entries");
    detail::note_sample_size(r, sample.size());
    detail::finish(r);
    return r;
}

// Axial (antipodal) symmetry: odd-degree coefficients vanish. Null covariance from
// the even-degree plug-in estimates up to degree 2(2L+1).
inline TestReport test_axial(const SampleSet& sample, int L, double alpha = 0.05) {
    detail::check_args(sample, L, alpha, "test_axial");
    TestReport r;
    r.test = "axial";
    r.L = L;
    r.alpha = alpha;
    auto est = estimate_coeffs(sample, 2 * (2 * L + 1));
    const auto& c = est.coeffs;
    auto null = [&](int k, int M) { return k % 2 == 0 ? c(k, M) : cdouble{}; };
    detail::stacked_test(r, c, null, axial_stack(L), sample.size());
    r.notes.push_back("free real components: " + std::to_string((L + 1) * (2 * L + 3)) +
                      "; the (L+2)L count gives " + std::to_string((L + 2) * L));
    detail::note_sample_size(r, sample.size());
    detail::finish(r);
    return r;
}

// Symmetry about the equatorial plane: a_h^m = 0 whenever h + m is odd. Null covariance
// from the plug-in estimates with that pattern imposed, up to degree 2(2L+1).
inline TestReport test_equatorial(const SampleSet& sample, int L, double alpha = 0.05) {
    detail::check_args(sample, L, alpha, "test_equatorial");
    TestReport r;
    r.test = "equatorial";
    r.L = L;
    r.alpha = alpha;
    auto est = estimate_coeffs(sample, 2 * (2 * L + 1));
    const auto& c = est.coeffs;
    auto null = [&](int k, int M) { return (k + M) % 2 == 0 ? c(k, M) : cdouble{}; };
    detail::stacked_test(r, c, null, equatorial_stack(L), sample.size());
    detail::note_sample_size(r, sample.size());
    detail::finish(r);
    return r;
}

// Symmetry about the meridian plane phi = phi0: Im(e^{i m phi0} a_l^m) = 0.
// joint: components whitened with their full plug-in covariance.
// diagonal: each component standardized by its own plug-in variance.
inline TestReport test_meridial(const SampleSet& sample, double phi0, int L, double alpha = 0.05,
                                MeridialMode mode = MeridialMode::joint) {
    detail::check_args(sample, L, alpha, "test_meridial");
    TestReport r;
    r.test = "meridial";
    r.L = L;
    r.alpha = alpha;
    auto est = estimate_coeffs(sample, 2 * L);
    const auto& c = est.coeffs;
    // Null-projected coefficients: e^{-i m phi0} Re(e^{i m phi0} a).
    auto null = [&](int k, int M) {
        cdouble w = std::polar(1.0, M * phi0);
        return std::conj(w) * (w * c(k, M)).real();
    };
    auto stack = meridial_stack(L, phi0);
    if (mode == MeridialMode::joint) {
        detail::stacked_test(r, c, null, stack, sample.size());
        r.notes.push_back("joint mode: components whitened by their plug-in covariance");
    } else {
        r.components = component_values(c, stack);
        Eigen::MatrixXd cov = stack_covariance(null, stack);
        double top = cov.diagonal().maxCoeff();
        double s = 0.0;
        int used = 0;
        for (std::size_t i = 0; i < stack.size(); ++i) {
            double v = cov(i, i);
            if (!(v > 1e-14 * std::max(top, 1e-300))) continue;
            s += r.components[i] * r.components[i] / v;
            ++used;
        }
        r.statistic = static_cast<double>(sample.size()) * s;
        r.df = used;
        if (used < static_cast<int>(stack.size()))
            r.notes.push_back(std::to_string(stack.size() - used) + " components with non-positive variance dropped");
        r.notes.push_back("diagonal mode: components standardized one at a time; correlations ignored");
    }
    detail::note_sample_size(r, sample.size());
    detail::finish(r);
    return r;
}

}  // namespace sphera
