// SPDX-License-Identifier: (Apache-2.0 OR MIT)
#pragma once

#include <algorithm>
#include <cmath>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include "bessel.hpp"
#include "coefficients.hpp"
#include "error.hpp"
#include "expansion.hpp"
#include "geometry.hpp"
#include "harmonics.hpp"
#include "kummer.hpp"
#include "legendre.hpp"
#include "quadrature.hpp"

namespace sphera {

// ---------------------------------------------------------------- model catalog

struct Uniform {};

// Heat kernel on the sphere: c_l = exp(-l(l+1) / (4 zeta)).
struct BrownianMotion {
    UnitVector x0;
    double zeta = 1.0;
};

struct VonMisesFisher {
    UnitVector mu;
    double kappa = 0.0;
};

// Dimroth-Watson: exp(gamma (mu.x)^2); bipolar for gamma > 0, girdle for gamma < 0.
struct Watson {
    UnitVector mu;
    double gamma = 0.0;
};

// Frames hold mu_1, mu_2, mu_3 as columns.
struct Bingham {
    double beta = 0.0;
    double gamma = 0.0;
    Mat3 frame = Mat3::Identity();
};

struct Kent {
    double kappa = 0.0;
    double beta = 0.0;
    Mat3 frame = Mat3::Identity();
};

// exp(kappa mu3.x + gamma (mu3.x)^2 + beta ((mu1.x)^2 - (mu2.x)^2))
struct Gfb6 {
    double kappa = 0.0;
    double beta = 0.0;
    double gamma = 0.0;
    Mat3 frame = Mat3::Identity();
};

// exp(kappa mu3.x + sum_k zeta_k (mu_k.x)^2) with zeta3 = -zeta1 - zeta2
struct Gfb6Zeta {
    double kappa = 0.0;
    double zeta1 = 0.0;
    double zeta2 = 0.0;
    Mat3 frame = Mat3::Identity();
};

// |Y_l^m|^2, or Y_{l,m}^2 for the real harmonic when `real` is set.
struct HarmonicSquare {
    int l = 0;
    int m = 0;
    bool real = false;
};

// exp(sum_{l >= 1} c_l^m Y_l^m); c_0^0 is recomputed as the normalizer.
struct ExponentialFamily {
    HarmonicCoefficients c;
};

// exp(sum_{l >= 1} c_l P_l(axis.x)); c[0] is recomputed as the normalizer.
struct ExponentialLegendre {
    std::vector<double> c;
    UnitVector axis;
};

// p W(gamma1, theta - alpha1) + (1 - p) W(gamma2, theta + alpha2), each factor
// proportional to exp(gamma cos^2(theta -+ alpha)) and normalized on its own.
struct MixtureWatson {
    double p = 0.5;
    double gamma1 = 0.0;
    double gamma2 = 0.0;
    double alpha1 = 0.0;
    double alpha2 = 0.0;
};

using ModelSpec = std::variant<Uniform, BrownianMotion, VonMisesFisher, Watson, Bingham, Kent, Gfb6, Gfb6Zeta,
                               HarmonicSquare, ExponentialFamily, ExponentialLegendre, MixtureWatson>;

inline std::string model_name(const ModelSpec& s) {
    static const char* names[] = {"uniform", "brownian_motion", "vmf",         "watson",
                                  "bingham", "kent",            "gfb6",        "gfb6_zeta",
                                  "harmonic_square", "exponential_family", "exponential_legendre",
                                  "mixture_watson"};
    return names[s.index()];
}

// The symmetric girdle model exp(gamma cos^2(theta - alpha)) + exp(gamma cos^2(theta + alpha)).
inline MixtureWatson girdle_model(double gamma, double alpha) { return {0.5, gamma, gamma, alpha, alpha}; }

// ---------------------------------------------------------------- quadratic-exponential view

namespace detail {

// kappa y3 + sum_k d_k y_k^2 in frame coordinates y = M^T x.
struct QuadExp {
    double kappa = 0.0;
    Vec3 d = Vec3::Zero();
    Mat3 frame = Mat3::Identity();

    double energy_local(const Vec3& y) const {
        return kappa * y.z() + d.x() * y.x() * y.x() + d.y() * y.y() * y.y() + d.z() * y.z() * y.z();
    }
    double energy(const Vec3& x) const { return energy_local(frame.transpose() * x); }
    // Upper bound on the energy over the sphere.
    double energy_bound() const { return std::abs(kappa) + std::max(0.0, d.maxCoeff()); }
    Mat3 matrix() const { return frame * d.asDiagonal() * frame.transpose(); }
};

inline bool quad_exp(const ModelSpec& s, QuadExp& q) {
    if (auto* b = std::get_if<Bingham>(&s)) {
        q = {0.0, Vec3(b->beta, -b->beta, b->gamma), b->frame};
    } else if (auto* k = std::get_if<Kent>(&s)) {
        q = {k->kappa, Vec3(k->beta, -k->beta, 0.0), k->frame};
    } else if (auto* g = std::get_if<Gfb6>(&s)) {
        q = {g->kappa, Vec3(g->beta, -g->beta, g->gamma), g->frame};
    } else if (auto* z = std::get_if<Gfb6Zeta>(&s)) {
        q = {z->kappa, Vec3(z->zeta1, z->zeta2, -z->zeta1 - z->zeta2), z->frame};
    } else {
        return false;
    }
    return true;
}

// Integral over [a, b] with Gauss-Legendre node doubling until successive values
// agree to rel_tol * |value| or abs_tol.
template <class F>
double integrate_converged(F&& g, double a, double b, double rel_tol = 1e-13, double abs_tol = 0.0, int n0 = 64,
                           int nmax = 1 << 15) {
    double prev = integrate_gl(g, a, b, n0);
    for (int n = 2 * n0; n <= nmax; n *= 2) {
        double cur = integrate_gl(g, a, b, n);
        if (std::abs(cur - prev) <= std::max(rel_tol * std::abs(cur), abs_tol)) return cur;
        prev = cur;
    }
    throw NumericalError("1-D quadrature did not converge");
}

// Integral of exp(e(x) - shift) over the sphere with product-rule node doubling.
template <class E>
double sphere_integral_converged(E&& e, double shift, double rel_tol = 1e-10) {
    double prev = -1.0;
    for (int nt = 32; nt <= 2048; nt *= 2) {
        SphereGrid grid(nt, 2 * nt);
        double cur = grid.integrate([&](const UnitVector& x) { return std::exp(e(x) - shift); });
        if (prev > 0.0 && std::abs(cur - prev) <= rel_tol * cur) return cur;
        prev = cur;
    }
    throw NumericalError("normalizing constant: relative change above 1e-10 after node doubling");
}

inline double watson_component_log_z(double gamma, double alpha) {
    double shift = std::max(gamma, 0.0);
    double z = integrate_converged(
        [&](double th) {
            double c = std::cos(th - alpha);
            return std::exp(gamma * c * c - shift) * std::sin(th);
        },
        0.0, pi);
    return std::log(two_pi * z) + shift;
}

inline double exp_legendre_value(const std::vector<double>& c, double t) {
    double s = 0.0;
    double p0 = 1.0, p1 = t;
    for (std::size_t l = 1; l < c.size(); ++l) {
        if (l >= 2) {
            double p2 = ((2.0 * l - 1.0) * t * p1 - (l - 1.0) * p0) / l;
            p0 = p1;
            p1 = p2;
        }
        s += c[l] * p1;
    }
    return s;
}

inline double exp_family_energy(const HarmonicCoefficients& c, const UnitVector& x) {
    HarmonicCoefficients c1 = c;
    c1(0, 0) = 0.0;
    return evaluate(c1, x);
}

}  // namespace detail

// ---------------------------------------------------------------- validation

inline void validate(const ModelSpec& spec) {
    auto bad = [](const std::string& msg) { throw std::invalid_argument("model: " + msg); };
    auto check_frame = [&](const Mat3& m) {
        if (!m.allFinite() || !is_orthonormal(m)) bad("frame must be orthonormal to 1e-12");
    };
    std::visit(
        [&](const auto& m) {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, BrownianMotion>) {
                if (!(m.zeta > 0.0) || !std::isfinite(m.zeta)) bad("brownian motion needs zeta > 0");
            } else if constexpr (std::is_same_v<T, VonMisesFisher>) {
                if (!(m.kappa >= 0.0) || !std::isfinite(m.kappa)) bad("vmf needs finite kappa >= 0");
            } else if constexpr (std::is_same_v<T, Watson>) {
                if (!std::isfinite(m.gamma)) bad("watson needs finite gamma");
            } else if constexpr (std::is_same_v<T, Bingham>) {
                if (!std::isfinite(m.beta) || !std::isfinite(m.gamma)) bad("non-finite parameter");
                check_frame(m.frame);
            } else if constexpr (std::is_same_v<T, Kent>) {
                if (!std::isfinite(m.kappa) || !std::isfinite(m.beta)) bad("non-finite parameter");
                check_frame(m.frame);
            } else if constexpr (std::is_same_v<T, Gfb6>) {
                if (!std::isfinite(m.kappa) || !std::isfinite(m.beta) || !std::isfinite(m.gamma))
                    bad("non-finite parameter");
                check_frame(m.frame);
            } else if constexpr (std::is_same_v<T, Gfb6Zeta>) {
                if (!std::isfinite(m.kappa) || !std::isfinite(m.zeta1) || !std::isfinite(m.zeta2))
                    bad("non-finite parameter");
                check_frame(m.frame);
            } else if constexpr (std::is_same_v<T, HarmonicSquare>) {
                if (m.l < 0 || std::abs(m.m) > m.l) bad("harmonic square needs |m| <= l");
            } else if constexpr (std::is_same_v<T, ExponentialFamily>) {
                if (m.c.basis() != Basis::complex) bad("exponential family coefficients must be complex basis");
                if (m.c.conjugate_symmetry_violation() > conjugate_symmetry_tol)
                    bad("exponential family coefficients must be conjugate symmetric");
            } else if constexpr (std::is_same_v<T, ExponentialLegendre>) {
                if (m.c.empty()) bad("exponential legendre needs at least c_0");
                for (double v : m.c)
                    if (!std::isfinite(v)) bad("non-finite parameter");
            } else if constexpr (std::is_same_v<T, MixtureWatson>) {
                if (!(m.p >= 0.0 && m.p <= 1.0)) bad("mixture weight p must lie in [0, 1]");
                if (!(m.alpha1 >= 0.0 && m.alpha1 <= pi / 2) || !(m.alpha2 >= 0.0 && m.alpha2 <= pi / 2))
                    bad("mixture shifts must lie in [0, pi/2]");
                if (!std::isfinite(m.gamma1) || !std::isfinite(m.gamma2)) bad("non-finite parameter");
            }
        },
        spec);
}

// ---------------------------------------------------------------- Model

// Validated model with a lazily computed, shared normalizing constant.
class Model {
  public:
    explicit Model(ModelSpec spec) : s_(std::make_shared<State>()) {
        validate(spec);
        s_->spec = std::move(spec);
    }

    const ModelSpec& spec() const { return s_->spec; }

    // log of the integral of the unnormalized density (per component for mixtures).
    double log_normalizer() const {
        resolve();
        return s_->log_z;
    }

    double density(const UnitVector& x) const {
        resolve();
        const auto& sp = s_->spec;
        double lz = s_->log_z;
        if (std::holds_alternative<Uniform>(sp)) return 1.0 / four_pi;
        if (auto* m = std::get_if<BrownianMotion>(&sp)) return brownian_density(*m, x.dot(m->x0));
        if (auto* m = std::get_if<VonMisesFisher>(&sp)) {
            if (m->kappa == 0.0) return 1.0 / four_pi;
            double k = m->kappa;
            return k * std::exp(k * (x.dot(m->mu) - 1.0)) / (two_pi * -std::expm1(-2.0 * k));
        }
        if (auto* m = std::get_if<Watson>(&sp)) {
            double t = x.dot(m->mu);
            return std::exp(m->gamma * t * t - lz);
        }
        if (auto* m = std::get_if<HarmonicSquare>(&sp)) {
            if (m->real) {
                double y = real_sph_harm(m->l, m->m, x.angle());
                return y * y;
            }
            return std::norm(sph_harm(m->l, m->m, x.angle()));
        }
        if (auto* m = std::get_if<ExponentialFamily>(&sp)) return std::exp(detail::exp_family_energy(m->c, x) - lz);
        if (auto* m = std::get_if<ExponentialLegendre>(&sp))
            return std::exp(detail::exp_legendre_value(m->c, x.dot(m->axis)) - lz);
        if (auto* m = std::get_if<MixtureWatson>(&sp)) {
            double c1 = std::cos(x.theta() - m->alpha1), c2 = std::cos(x.theta() + m->alpha2);
            return m->p * std::exp(m->gamma1 * c1 * c1 - lz) +
                   (1.0 - m->p) * std::exp(m->gamma2 * c2 * c2 - s_->log_z2);
        }
        detail::QuadExp q;
        detail::quad_exp(sp, q);
        return std::exp(q.energy(x.cartesian()) - lz);
    }

    // Harmonic coefficients to degree L: closed forms or 1-D quadrature where the
    // density is rotationally symmetric, converged sphere projection otherwise.
    HarmonicCoefficients coefficients(int L) const {
        if (L < 0) throw std::domain_error("coefficients: negative degree");
        const auto& sp = s_->spec;
        if (std::holds_alternative<Uniform>(sp)) return HarmonicCoefficients::uniform(L);
        if (auto* m = std::get_if<BrownianMotion>(&sp)) {
            std::vector<double> c(L + 1);
            for (int l = 0; l <= L; ++l) c[l] = std::exp(-l * (l + 1.0) / (4.0 * m->zeta));
            return zonal_coefficients(c, m->x0);
        }
        if (auto* m = std::get_if<VonMisesFisher>(&sp))
            return zonal_coefficients(bessel_i_half_ratios(L, m->kappa), m->mu);
        if (auto* m = std::get_if<Watson>(&sp)) return zonal_coefficients(watson_c(m->gamma, L), m->mu);
        if (auto* m = std::get_if<HarmonicSquare>(&sp)) {
            HarmonicCoefficients b(m->l, m->real ? Basis::real : Basis::complex);
            b(m->l, m->m) = 1.0;
            if (m->real) b = to_complex(b);
            return square_expand(b).resized(L);
        }
        if (auto* m = std::get_if<ExponentialLegendre>(&sp)) {
            resolve();
            double lz = s_->log_z;
            std::vector<double> c(L + 1);
            for (int l = 0; l <= L; ++l)
                c[l] = two_pi * detail::integrate_converged(
                                    [&](double t) {
                                        return std::exp(detail::exp_legendre_value(m->c, t) - lz) * legendre_p(l, t);
                                    },
                                    -1.0, 1.0, 1e-13, 1e-16, std::max(64, 2 * L));
            c[0] = 1.0;
            return zonal_coefficients(c, m->axis);
        }
        if (std::holds_alternative<MixtureWatson>(sp)) {
            std::vector<double> c = mixture_c(L);
            return zonal_coefficients(c, north_pole);
        }
        return projected_coefficients(L);
    }

    // Converged quadrature projection of the density, available for every model.
    HarmonicCoefficients projected_coefficients(int L, double tol = 1e-13) const {
        resolve();
        Model self = *this;
        return project_converged([&](const UnitVector& x) { return self.density(x); }, L, tol).coeffs;
    }

    // c_l = E[P_l(cos theta)] for the mixture, by 1-D quadrature in theta.
    std::vector<double> mixture_c(int L) const {
        const auto* m = std::get_if<MixtureWatson>(&s_->spec);
        if (!m) throw std::invalid_argument("mixture_c: not a mixture-Watson model");
        resolve();
        std::vector<double> c(L + 1);
        std::vector<double> p(L + 1);
        for (int n = 128;; n *= 2) {
            std::vector<double> cur(L + 1, 0.0);
            const auto& q = gauss_legendre(n);
            for (std::size_t i = 0; i < q.size(); ++i) {
                double th = 0.5 * pi * (q.nodes[i] + 1.0);
                double w = 0.5 * pi * q.weights[i];
                double c1 = std::cos(th - m->alpha1), c2 = std::cos(th + m->alpha2);
                double f = m->p * std::exp(m->gamma1 * c1 * c1 - s_->log_z) +
                           (1.0 - m->p) * std::exp(m->gamma2 * c2 * c2 - s_->log_z2);
                legendre_p_all(L, std::cos(th), p.data());
                for (int l = 0; l <= L; ++l) cur[l] += two_pi * w * f * std::sin(th) * p[l];
            }
            double diff = 0.0;
            for (int l = 0; l <= L; ++l) diff = std::max(diff, std::abs(cur[l] - c[l]));
            c = cur;
            if (n > 128 && diff < 1e-14) break;
            if (n >= (1 << 15)) throw NumericalError("mixture coefficients did not converge");
        }
        return c;
    }

    // Watson c_l = int e^{gamma t^2} P_l dt / int e^{gamma t^2} dt (odd l vanish).
    static std::vector<double> watson_c(double gamma, int L) {
        std::vector<double> c(L + 1, 0.0);
        c[0] = 1.0;
        double shift = std::max(gamma, 0.0);
        auto w = [&](double t) { return std::exp(gamma * t * t - shift); };
        double z = detail::integrate_converged(w, -1.0, 1.0, 1e-14, 0.0, std::max(64, 2 * L));
        for (int l = 2; l <= L; l += 2)
            c[l] = detail::integrate_converged([&](double t) { return w(t) * legendre_p(l, t); }, -1.0, 1.0, 1e-14,
                                               1e-15 * z, std::max(64, 2 * L)) /
                   z;
        return c;
    }

  private:
    struct State {
        ModelSpec spec;
        std::once_flag once;
        double log_z = 0.0;
        double log_z2 = 0.0;
    };

    // a_l^m = c_l conj(Y_l^m(axis)) for a density depending on axis.x only.
    static HarmonicCoefficients zonal_coefficients(const std::vector<double>& c, const UnitVector& axis) {
        int L = static_cast<int>(c.size()) - 1;
        HarmonicCoefficients out(L);
        std::vector<cdouble> y = sph_harm_all(L, axis);
        for (int l = 0; l <= L; ++l)
            for (int m = -l; m <= l; ++m) out(l, m) = c[l] * std::conj(y[lm_index(l, m)]);
        out(0, 0) = 1.0 / std::sqrt(four_pi);
        return out;
    }

    static double brownian_density(const BrownianMotion& m, double t) {
        double s = 0.0;
        for (int l = 0;; ++l) {
            double w = std::exp(-l * (l + 1.0) / (4.0 * m.zeta)) * (2.0 * l + 1.0) / four_pi;
            if (w < 1e-14 && l > 0) break;
            s += w * legendre_p(l, std::clamp(t, -1.0, 1.0));
        }
        return s;
    }

    void resolve() const {
        std::call_once(s_->once, [this] { compute_normalizer(); });
    }

    void compute_normalizer() const {
        auto& st = *s_;
        const auto& sp = st.spec;
        if (auto* m = std::get_if<Watson>(&sp)) {
            st.log_z = std::log(four_pi) + log_kummer_m(m->gamma);
        } else if (auto* m = std::get_if<ExponentialFamily>(&sp)) {
            double shift = -INFINITY;
            SphereGrid(64, 128).for_each([&](double th, double ph, double) {
                shift = std::max(shift, detail::exp_family_energy(m->c, UnitVector::from_angles(th, ph)));
            });
            auto e = [&](const UnitVector& x) { return detail::exp_family_energy(m->c, x); };
            st.log_z = std::log(detail::sphere_integral_converged(e, shift)) + shift;
        } else if (auto* m = std::get_if<ExponentialLegendre>(&sp)) {
            double shift = -INFINITY;
            for (int i = 0; i <= 2000; ++i) shift = std::max(shift, detail::exp_legendre_value(m->c, -1.0 + i / 1000.0));
            double z = detail::integrate_converged(
                [&](double t) { return std::exp(detail::exp_legendre_value(m->c, t) - shift); }, -1.0, 1.0, 1e-13);
            st.log_z = std::log(two_pi * z) + shift;
        } else if (auto* m = std::get_if<MixtureWatson>(&sp)) {
            st.log_z = detail::watson_component_log_z(m->gamma1, m->alpha1);
            st.log_z2 = detail::watson_component_log_z(m->gamma2, -m->alpha2);
        } else {
            detail::QuadExp q;
            if (detail::quad_exp(sp, q)) {
                double shift = q.energy_bound();
                // Integrate in the model frame: the rule is rotation invariant and
                // the pole-aligned grid resolves concentration around mu_3.
                auto e = [&](const UnitVector& y) { return q.energy_local(y.cartesian()); };
                st.log_z = std::log(detail::sphere_integral_converged(e, shift)) + shift;
            }
        }
    }

    std::shared_ptr<State> s_;
};

inline double density(const Model& model, const UnitVector& x) { return model.density(x); }
inline HarmonicCoefficients coefficients(const Model& model, int L) { return model.coefficients(L); }

// Funk-Hecke constant 2 pi int_{-1}^{1} g(t) P_l(t) dt. Accuracy is relative to
// int |g P_l|, since for large l the signed integral cancels far below that scale.
template <class G>
double funk_hecke(G&& g, int l) {
    if (l < 0) throw std::domain_error("funk_hecke: negative degree");
    auto gp = [&](double t) { return g(t) * legendre_p(l, t); };
    int n0 = std::max(32, l + 1);
    double scale = integrate_gl([&](double t) { return std::abs(gp(t)); }, -1.0, 1.0, 4 * n0);  // magnitude only
    return two_pi * detail::integrate_converged(gp, -1.0, 1.0, 1e-14, 1e-13 * scale, n0);
}

}  // namespace sphera
