// SPDX-License-Identifier: (Apache-2.0 OR MIT)
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "detail/parallel.hpp"
#include "error.hpp"
#include "geometry.hpp"
#include "models.hpp"
#include "rng.hpp"

namespace sphera {

struct SampleSet {
    std::vector<UnitVector> points;
    std::uint64_t seed = 0;
    std::optional<ModelSpec> model;

    std::size_t size() const { return points.size(); }
    std::size_t n() const { return points.size(); }
};

inline constexpr long rejection_cap = 1000000;

namespace detail {

inline void rejection_failed(const char* who) {
    throw NumericalError(std::string(who) + ": rejection loop exceeded 1e6 proposals");
}

// Point with cos(angle to pole) = t and azimuth psi, in a frame whose third column is the pole.
inline UnitVector from_local(const Mat3& frame, double t, double psi) {
    t = std::clamp(t, -1.0, 1.0);
    double s = std::sqrt(std::max(0.0, 1.0 - t * t));
    return UnitVector::from_cartesian(frame * Vec3(s * std::cos(psi), s * std::sin(psi), t));
}

// Frame sending the north pole to mu.
inline Mat3 pole_frame(const UnitVector& mu) { return rotation_z(mu.phi()) * rotation_y(mu.theta()); }

inline UnitVector draw_uniform(RandomStream& r) {
    double t = 2.0 * r.uniform() - 1.0;
    return from_local(Mat3::Identity(), t, two_pi * r.uniform());
}

// t with density proportional to exp(kappa t) on [-1, 1], by inversion.
inline double draw_vmf_t(RandomStream& r, double kappa) {
    if (kappa == 0.0) return 2.0 * r.uniform() - 1.0;
    double v = r.uniform();  // v in [0, 1) keeps the log argument positive
    return 1.0 + std::log1p(v * std::expm1(-2.0 * kappa)) / kappa;
}

// t with density proportional to exp(gamma t^2) on [-1, 1].
inline double draw_watson_t(RandomStream& r, double gamma) {
    if (gamma <= -5.0) {
        // Exact truncated Gaussian with variance 1 / (2 |gamma|).
        double sd = std::sqrt(0.5 / -gamma);
        for (long it = 0; it < rejection_cap; ++it) {
            double t = sd * r.normal();
            if (std::abs(t) <= 1.0) return t;
        }
    } else if (gamma < 5.0) {
        double top = std::max(gamma, 0.0);
        for (long it = 0; it < rejection_cap; ++it) {
            double t = 2.0 * r.uniform() - 1.0;
            if (r.uniform() < std::exp(gamma * t * t - top)) return t;
        }
    } else {
        // Envelope exp(gamma |t|) >= exp(gamma t^2) on [-1, 1].
        for (long it = 0; it < rejection_cap; ++it) {
            double s = 1.0 + std::log1p(r.uniform() * std::expm1(-gamma)) / gamma;
            double sign = r.uniform() < 0.5 ? -1.0 : 1.0;
            if (r.uniform() < std::exp(gamma * (s * s - s))) return sign * s;
        }
    }
    rejection_failed("sample_watson");
    return 0.0;
}

template <class Draw>
SampleSet generate(std::size_t n, std::uint64_t seed, std::optional<ModelSpec> model, Draw&& draw) {
    if (n < 1) throw std::invalid_argument("sample: n must be >= 1");
    SampleSet s;
    s.seed = seed;
    s.model = std::move(model);
    s.points.resize(n);
    std::size_t nb = (n + reduction_block - 1) / reduction_block;
    parallel_for(nb, [&](std::size_t b) {
        std::size_t lo = b * reduction_block, hi = std::min(n, lo + reduction_block);
        for (std::size_t i = lo; i < hi; ++i) {
            RandomStream r(seed, i);
            s.points[i] = draw(r);
        }
    });
    return s;
}

}  // namespace detail

inline SampleSet sample_uniform(std::size_t n, std::uint64_t seed) {
    return detail::generate(n, seed, ModelSpec{Uniform{}}, [](RandomStream& r) { return detail::draw_uniform(r); });
}

inline SampleSet sample_vmf(std::size_t n, const UnitVector& mu, double kappa, std::uint64_t seed) {
    validate(VonMisesFisher{mu, kappa});
    Mat3 f = detail::pole_frame(mu);
    return detail::generate(n, seed, ModelSpec{VonMisesFisher{mu, kappa}}, [&](RandomStream& r) {
        double t = detail::draw_vmf_t(r, kappa);
        return detail::from_local(f, t, two_pi * r.uniform());
    });
}

inline SampleSet sample_watson(std::size_t n, const UnitVector& mu, double gamma, std::uint64_t seed) {
    validate(Watson{mu, gamma});
    Mat3 f = detail::pole_frame(mu);
    return detail::generate(n, seed, ModelSpec{Watson{mu, gamma}}, [&](RandomStream& r) {
        double t = detail::draw_watson_t(r, gamma);
        return detail::from_local(f, t, two_pi * r.uniform());
    });
}

// GFB family (Bingham, Kent, GFB6 in either parametrization). Proposal vMF(mu3, kappa);
// the quadratic part x^T A x is bounded by the largest eigenvalue of A, which is an
// exact envelope constant.
inline SampleSet sample_gfb6(std::size_t n, const ModelSpec& spec, std::uint64_t seed) {
    validate(spec);
    detail::QuadExp q;
    if (!detail::quad_exp(spec, q)) throw std::invalid_argument("sample_gfb6: not a GFB-family model");
    Mat3 f = q.frame;
    double kappa = q.kappa;
    if (kappa < 0.0) {
        // Draw around -mu3 instead; flip mu2 too so the frame stays right-handed.
        f.col(2) = -f.col(2);
        f.col(1) = -f.col(1);
        kappa = -kappa;
    }
    double top = q.d.maxCoeff();
    Mat3 a = q.matrix();
    return detail::generate(n, seed, ModelSpec{spec}, [&](RandomStream& r) {
        for (long it = 0; it < rejection_cap; ++it) {
            double t = detail::draw_vmf_t(r, kappa);
            UnitVector x = detail::from_local(f, t, two_pi * r.uniform());
            const Vec3& v = x.cartesian();
            if (r.uniform() < std::exp(v.dot(a * v) - top)) return x;
        }
        detail::rejection_failed("sample_gfb6");
        return UnitVector{};
    });
}

// Mixture of colatitude-shifted Watson factors. Each factor's colatitude marginal
// exp(gamma cos^2(theta -+ alpha)) sin(theta) is sampled exactly by rejection from
// cos(theta) ~ U(-1, 1); longitude is uniform.
inline SampleSet sample_mixture_watson(std::size_t n, double p, double gamma1, double gamma2, double alpha1,
                                       double alpha2, std::uint64_t seed) {
    MixtureWatson m{p, gamma1, gamma2, alpha1, alpha2};
    validate(m);
    return detail::generate(n, seed, ModelSpec{m}, [&](RandomStream& r) {
        bool first = r.uniform() < p;
        double g = first ? gamma1 : gamma2;
        double shift = first ? alpha1 : -alpha2;
        double top = std::max(g, 0.0);
        for (long it = 0; it < rejection_cap; ++it) {
            double t = 2.0 * r.uniform() - 1.0;
            double c = std::cos(std::acos(t) - shift);
            if (r.uniform() < std::exp(g * c * c - top))
                return detail::from_local(Mat3::Identity(), t, two_pi * r.uniform());
        }
        detail::rejection_failed("sample_mixture_watson");
        return UnitVector{};
    });
}

// Any catalog model. Models without a dedicated sampler use a uniform proposal
// whose envelope is an exact bound where one is known, otherwise the maximum of
// the density over a 10^6-point grid times 1.01.
inline SampleSet sample(const Model& model, std::size_t n, std::uint64_t seed) {
    const ModelSpec& sp = model.spec();
    if (std::holds_alternative<Uniform>(sp)) return sample_uniform(n, seed);
    if (auto* m = std::get_if<VonMisesFisher>(&sp)) return sample_vmf(n, m->mu, m->kappa, seed);
    if (auto* m = std::get_if<Watson>(&sp)) return sample_watson(n, m->mu, m->gamma, seed);
    if (auto* m = std::get_if<MixtureWatson>(&sp))
        return sample_mixture_watson(n, m->p, m->gamma1, m->gamma2, m->alpha1, m->alpha2, seed);
    detail::QuadExp q;
    if (detail::quad_exp(sp, q)) return sample_gfb6(n, sp, seed);

    double bound = 0.0;
    if (auto* m = std::get_if<BrownianMotion>(&sp)) {
        bound = model.density(m->x0);
    } else if (auto* m = std::get_if<HarmonicSquare>(&sp)) {
        bound = (2.0 * m->l + 1.0) / four_pi;
    } else if (auto* m = std::get_if<ExponentialLegendre>(&sp)) {
        double top = -INFINITY;
        for (int i = 0; i <= 1000000; ++i)
            top = std::max(top, detail::exp_legendre_value(m->c, -1.0 + 2.0 * i / 1e6));
        bound = 1.01 * std::exp(top - model.log_normalizer());
    } else {
        const int nt = 1000, np = 1000;
        std::vector<double> rows(nt);
        detail::parallel_for(nt, [&](std::size_t i) {
            double th = pi * (i + 0.5) / nt, best = 0.0;
            for (int j = 0; j < np; ++j) best = std::max(best, model.density(UnitVector::from_angles(th, two_pi * j / np)));
            rows[i] = best;
        });
        bound = 1.01 * *std::max_element(rows.begin(), rows.end());
    }
    return detail::generate(n, seed, ModelSpec{sp}, [&](RandomStream& r) {
        for (long it = 0; it < rejection_cap; ++it) {
            UnitVector x = detail::draw_uniform(r);
            if (r.uniform() * bound < model.density(x)) return x;
        }
        detail::rejection_failed("sample");
        return UnitVector{};
    });
}

inline SampleSet sample(const ModelSpec& spec, std::size_t n, std::uint64_t seed) {
    return sample(Model(spec), n, seed);
}

}  // namespace sphera
