// SPDX-License-Identifier: (Apache-2.0 OR MIT)
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <vector>

#include "chi2.hpp"
#include "error.hpp"
#include "geometry.hpp"
#include "legendre.hpp"
#include "quadrature.hpp"
#include "sampling.hpp"

namespace sphera {

// ---------------------------------------------------------------- histogram

struct HistogramBin {
    int ring = 0;
    int sector = 0;
    UnitVector center;
    std::size_t count = 0;
};

// Equal-area iso-latitude rings with 12 r^2 bins: 4r - 1 rings, 4i sectors in the
// i-th polar ring, 4r sectors in each of the 2r + 1 equatorial rings.
struct SphereHistogram {
    int resolution = 1;
    std::vector<double> z_bounds;     // ring k spans z in [z_bounds[k+1], z_bounds[k]]
    std::vector<int> sectors;         // per ring
    std::vector<std::size_t> offset;  // first bin of each ring
    std::vector<HistogramBin> bins;
    std::size_t n = 0;

    int ring_count() const { return static_cast<int>(sectors.size()); }

    // Colatitude of the equal-area midpoint of a ring.
    double ring_colatitude(int k) const { return std::acos(0.5 * (z_bounds[k] + z_bounds[k + 1])); }

    // Mean count per bin in each ring.
    std::vector<double> ring_averages() const {
        std::vector<double> out(sectors.size(), 0.0);
        for (const auto& b : bins) out[b.ring] += static_cast<double>(b.count);
        for (std::size_t k = 0; k < out.size(); ++k) out[k] /= sectors[k];
        return out;
    }

    std::size_t bin_count() const { return bins.size(); }
};

inline SphereHistogram make_histogram_layout(int r) {
    if (r < 1) throw std::invalid_argument("build_histogram: resolution must be >= 1");
    SphereHistogram h;
    h.resolution = r;
    int rings = 4 * r - 1;
    for (int i = 1; i <= rings; ++i) {
        int s = i < r ? 4 * i : (i <= 3 * r ? 4 * r : 4 * (4 * r - i));
        h.sectors.push_back(s);
    }
    double total = 12.0 * r * r;
    h.z_bounds.push_back(1.0);
    std::size_t cum = 0;
    for (int k = 0; k < rings; ++k) {
        h.offset.push_back(cum);
        cum += static_cast<std::size_t>(h.sectors[k]);
        h.z_bounds.push_back(k + 1 == rings ? -1.0 : 1.0 - 2.0 * static_cast<double>(cum) / total);
    }
    for (int k = 0; k < rings; ++k) {
        double th = h.ring_colatitude(k);
        for (int j = 0; j < h.sectors[k]; ++j)
            h.bins.push_back({k, j, UnitVector::from_angles(th, two_pi * (j + 0.5) / h.sectors[k]), 0});
    }
    return h;
}

// Ring containing z; a point on a boundary goes to the lower ring index.
inline int histogram_ring(const SphereHistogram& h, double z) {
    // z_bounds is descending; first k with z >= z_bounds[k + 1].
    int lo = 0, hi = h.ring_count() - 1;
    while (lo < hi) {
        int mid = (lo + hi) / 2;
        if (z >= h.z_bounds[mid + 1]) hi = mid;
        else lo = mid + 1;
    }
    return lo;
}

inline SphereHistogram build_histogram(const SampleSet& sample, int resolution) {
    SphereHistogram h = make_histogram_layout(resolution);
    for (const auto& x : sample.points) {
        int k = histogram_ring(h, x.z());
        int s = h.sectors[k];
        int j = std::min(s - 1, static_cast<int>(x.phi() / two_pi * s));
        ++h.bins[h.offset[k] + static_cast<std::size_t>(j)].count;
    }
    h.n = sample.size();
    return h;
}

// ---------------------------------------------------------------- girdle shift

// alpha_hat = |pi/2 - theta_peak|, where theta_peak is the maximum of the
// longitude-averaged profile folded about the equator, refined by a parabola
// through the log counts of the peak ring and its neighbours.
inline constexpr double flat_profile_p = 1e-3;

inline double estimate_alpha(const SphereHistogram& h) {
    std::vector<double> avg = h.ring_averages();
    int R = h.ring_count();
    // Chi-square homogeneity of the ring counts against the equal-area expectation.
    double total = static_cast<double>(h.n), bins = static_cast<double>(h.bin_count()), chi = 0.0;
    for (int k = 0; k < R; ++k) {
        double e = total * h.sectors[k] / bins, o = avg[k] * h.sectors[k];
        if (e > 0.0) chi += (o - e) * (o - e) / e;
    }
    if (!(total > 0.0) || chi2_sf(chi, R - 1) > flat_profile_p)
        throw DataError("estimate_alpha: latitude profile consistent with uniform (chi-square p > 1e-3); "
                        "data do not look girdle-shaped");
    int eq = R / 2;  // equatorial ring
    std::vector<double> fold(R);
    for (int k = 0; k < R; ++k) fold[k] = 0.5 * (avg[k] + avg[R - 1 - k]);
    int best = 0;
    for (int k = 1; k <= eq; ++k)
        if (fold[k] > fold[best]) best = k;
    double theta = h.ring_colatitude(best);
    if (best > 0) {
        int a = best - 1, c = best + 1;  // c may be the mirror of a when best is the equator
        double x0 = h.ring_colatitude(a), x1 = theta, x2 = h.ring_colatitude(c);
        double y0 = fold[a], y1 = fold[best], y2 = fold[c];
        if (y0 > 0.0 && y1 > 0.0 && y2 > 0.0) {
            y0 = std::log(y0);
            y1 = std::log(y1);
            y2 = std::log(y2);
        }
        // Vertex of the parabola through three points with uneven spacing.
        double d0 = (y1 - y0) / (x1 - x0), d1 = (y2 - y1) / (x2 - x1);
        double curv = (d1 - d0) / (x2 - x0);
        if (curv < 0.0) {
            double v = 0.5 * (x0 + x1) - d0 / (2.0 * curv);
            theta = std::clamp(v, x0, x2);
        }
    }
    return std::clamp(std::abs(pi / 2 - theta), 0.0, pi / 2);
}

// ---------------------------------------------------------------- concentration fit

struct GirdleFit {
    double alpha_hat = 0.0;
    double gamma_hat = 0.0;
    double residual = 0.0;
    std::vector<double> c_hat;    // c_hat_{2l}, l = 1..count
    std::vector<double> c_model;  // c_{2l}(gamma_hat, alpha_hat)
    int iterations = 0;
    double grid_gamma = 0.0;                // best grid-scan start
    std::vector<double> objective_trace;  // objective after each accepted step
};

struct FitOptions {
    int count = 10;             // even degrees 2, 4, ..., 2 count
    bool girdle = true;         // restrict the search to gamma < 0
    int max_iterations = 200;
    int grid_points = 80;       // per sign, log-spaced over |gamma| in [0.5, 200]
};

// c_{2l}(gamma, alpha) for the symmetric girdle mixture, l = 1..count, by a fixed
// 1024-node Gauss-Legendre rule in theta.
inline std::vector<double> girdle_model_c(double gamma, double alpha, int count) {
    const auto& q = gauss_legendre(1024);
    int L = 2 * count;
    std::vector<double> p(L + 1), acc(L + 1, 0.0);
    double shift = std::max(gamma, 0.0);
    for (std::size_t i = 0; i < q.size(); ++i) {
        double th = 0.5 * pi * (q.nodes[i] + 1.0);
        double c1 = std::cos(th - alpha), c2 = std::cos(th + alpha);
        double f = (std::exp(gamma * c1 * c1 - shift) + std::exp(gamma * c2 * c2 - shift)) * std::sin(th) * q.weights[i];
        legendre_p_all(L, std::cos(th), p.data());
        for (int l = 0; l <= L; ++l) acc[l] += f * p[l];
    }
    std::vector<double> c(count);
    for (int l = 1; l <= count; ++l) c[l - 1] = acc[2 * l] / acc[0];
    return c;
}

// c_hat_{2l} = mean P_{2l}(cos theta_k), l = 1..count.
inline std::vector<double> even_legendre_means(const SampleSet& sample, int count) {
    int L = 2 * count;
    std::vector<double> p(L + 1);
    std::vector<detail::CompensatedSum> acc(count);
    for (const auto& x : sample.points) {
        legendre_p_all(L, x.z(), p.data());
        for (int l = 1; l <= count; ++l) acc[l - 1].add(p[2 * l]);
    }
    std::vector<double> c(count);
    for (int l = 0; l < count; ++l) c[l] = acc[l].value() / static_cast<double>(sample.size());
    return c;
}

// Least-squares gamma for given alpha and target coefficients c_hat.
inline GirdleFit fit_gamma_to(const std::vector<double>& c_hat, double alpha, const FitOptions& opt = {}) {
    int count = static_cast<int>(c_hat.size());
    auto objective = [&](double g) {
        auto c = girdle_model_c(g, alpha, count);
        double s = 0.0;
        for (int i = 0; i < count; ++i) s += (c_hat[i] - c[i]) * (c_hat[i] - c[i]);
        return s;
    };
    // Log-spaced grid scan; ties go to the smallest gamma.
    std::vector<double> grid;
    for (int i = 0; i < opt.grid_points; ++i) {
        double a = 0.5 * std::pow(400.0, i / double(opt.grid_points - 1));
        grid.push_back(-a);
        if (!opt.girdle) grid.push_back(a);
    }
    std::sort(grid.begin(), grid.end());
    double g = grid.front(), best = objective(g);
    for (double v : grid) {
        double s = objective(v);
        if (s < best) {
            best = s;
            g = v;
        }
    }
    GirdleFit fit;
    fit.alpha_hat = alpha;
    fit.grid_gamma = g;
    fit.objective_trace.push_back(best);

    // Levenberg-Marquardt in one parameter with a central-difference Jacobian.
    double lambda = 1e-3;
    bool converged = false;
    int it = 0;
    for (; it < opt.max_iterations; ++it) {
        double h = 1e-6 * std::max(std::abs(g), 1.0);
        auto cp = girdle_model_c(g + h, alpha, count), cm = girdle_model_c(g - h, alpha, count);
        auto c0 = girdle_model_c(g, alpha, count);
        double jtj = 0.0, jtr = 0.0;
        for (int i = 0; i < count; ++i) {
            double j = (cp[i] - cm[i]) / (2.0 * h);
            jtj += j * j;
            jtr += j * (c_hat[i] - c0[i]);
        }
        if (jtj == 0.0) break;
        if (std::abs(jtr) <= 1e-14 * std::sqrt(jtj) * std::max(std::sqrt(best), 1e-300)) {
            converged = true;
            break;
        }
        bool accepted = false;
        while (lambda < 1e12) {
            double step = jtr / (jtj * (1.0 + lambda));
            double trial = g + step;
            bool admissible = !opt.girdle || trial < 0.0;
            double s = admissible ? objective(trial) : INFINITY;
            if (s < best) {
                double rel = std::abs(step) / std::max(std::abs(g), 1.0);
                g = trial;
                best = s;
                fit.objective_trace.push_back(s);
                lambda = std::max(lambda / 10.0, 1e-12);
                accepted = true;
                if (rel < 1e-12) converged = true;
                break;
            }
            lambda *= 10.0;
        }
        if (!accepted) {
            // No decreasing step at any damping: g is a stationary point to rounding.
            converged = true;
            break;
        }
        if (converged) break;
    }
    if (!converged) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "fit_gamma: no convergence after %d iterations (best grid point gamma = %.6g)",
                      opt.max_iterations, fit.grid_gamma);
        throw NumericalError(buf);
    }
    fit.iterations = it;
    fit.gamma_hat = g;
    fit.residual = best;
    fit.c_hat = c_hat;
    fit.c_model = girdle_model_c(g, alpha, count);
    return fit;
}

// The sample must already be in the symmetry frame (axis at N).
inline GirdleFit fit_gamma(const SampleSet& sample, double alpha, const FitOptions& opt = {}) {
    if (sample.size() < 1) throw std::invalid_argument("fit_gamma: empty sample");
    return fit_gamma_to(even_legendre_means(sample, opt.count), alpha, opt);
}

inline GirdleFit fit_mixture_watson(const SampleSet& sample, int resolution = 16, const FitOptions& opt = {}) {
    if (sample.size() < 1000) throw std::invalid_argument("fit_mixture_watson: needs n >= 1000");
    SphereHistogram h = build_histogram(sample, resolution);
    double a = estimate_alpha(h);
    return fit_gamma(sample, a, opt);
}

}  // namespace sphera
