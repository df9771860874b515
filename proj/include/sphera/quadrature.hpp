// SPDX-License-Identifier: (Apache-2.0 OR MIT)
#pragma once

#include <cmath>
#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <vector>

#include "geometry.hpp"

namespace sphera {

// Gauss-Legendre rule on [-1, 1]; exact for polynomials of degree <= 2n - 1.
struct QuadratureRule {
    std::vector<double> nodes;    // ascending
    std::vector<double> weights;  // positive, sum to 2

    std::size_t size() const { return nodes.size(); }
};

inline QuadratureRule make_gauss_legendre(int n) {
    if (n < 1) throw std::domain_error("gauss_legendre: n must be >= 1");
    QuadratureRule q;
    q.nodes.resize(n);
    q.weights.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) {
                // one more evaluation of the derivative at the converged node
                p0 = 1.0;
                p1 = x;
                for (int k = 2; k <= n; ++k) {
                    double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n * (x * p1 - p0) / (x * x - 1.0);
                break;
            }
        }
        double w = 2.0 / ((1.0 - x * x) * dp * dp);
        q.nodes[n - 1 - i] = x;
        q.nodes[i] = -x;
        q.weights[i] = q.weights[n - 1 - i] = w;
    }
    if (n % 2 == 1) q.nodes[n / 2] = 0.0;
    return q;
}

// Cached rule; the returned reference stays valid for the program lifetime.
inline const QuadratureRule& gauss_legendre(int n) {
    static std::mutex mu;
    static std::map<int, std::unique_ptr<QuadratureRule>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto& slot = cache[n];
    if (!slot) slot = std::make_unique<QuadratureRule>(make_gauss_legendre(n));
    return *slot;
}

// Integral over [a, b] of g with an n-point Gauss-Legendre rule.
template <class F>
double integrate_gl(F&& g, double a, double b, int n) {
    const auto& q = gauss_legendre(n);
    double h = 0.5 * (b - a), c = 0.5 * (b + a), s = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i) s += q.weights[i] * g(c + h * q.nodes[i]);
    return h * s;
}

// Product rule on the sphere: Gauss-Legendre in cos(theta) times uniform phi.
struct SphereGrid {
    int n_theta = 0;
    int n_phi = 0;

    SphereGrid(int nt, int np) : n_theta(nt), n_phi(np) {
        if (nt < 1 || np < 1) throw std::domain_error("SphereGrid: empty grid");
    }
    // Default resolution exact for integrands band-limited to degree 2L.
    static SphereGrid for_degree(int lmax) { return SphereGrid(2 * (lmax + 1), 4 * (lmax + 1)); }

    // Calls f(theta, phi, weight) for every node in a fixed order.
    template <class F>
    void for_each(F&& f) const {
        const auto& q = gauss_legendre(n_theta);
        double wphi = two_pi / n_phi;
        for (int i = 0; i < n_theta; ++i) {
            double th = std::acos(q.nodes[i]);
            for (int j = 0; j < n_phi; ++j) f(th, two_pi * j / n_phi, q.weights[i] * wphi);
        }
    }

    template <class F>
    double integrate(F&& f) const {
        double s = 0.0;
        for_each([&](double th, double ph, double w) { s += w * f(UnitVector::from_angles(th, ph)); });
        return s;
    }
};

}  // namespace sphera
