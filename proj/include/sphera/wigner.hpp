// SPDX-License-Identifier: (Apache-2.0 OR MIT)
#pragma once

#include <cmath>
#include <complex>
#include <cstdlib>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>

#include <Eigen/Dense>

#include "geometry.hpp"

namespace sphera {

namespace detail {

// Eigenvectors of J_y in the |l, m> basis (Condon-Shortley ladder phases).
// The factorial-sum formula for d loses digits to cancellation near beta = pi/2
// once l reaches the teens, so d(beta) = exp(-i beta J_y) is built spectrally.
struct JyBasis {
    Eigen::MatrixXcd vectors;
    Eigen::VectorXd eigenvalues;
};

inline JyBasis make_jy_basis(int l) {
    int n = 2 * l + 1;
    Eigen::MatrixXcd jy = Eigen::MatrixXcd::Zero(n, n);
    for (int m = -l; m < l; ++m) {
        double s = std::sqrt(double(l) * (l + 1) - double(m) * (m + 1));
        // J_y = (J_+ - J_-) / 2i
        jy(m + 1 + l, m + l) = std::complex<double>(0.0, -0.5 * s);
        jy(m + l, m + 1 + l) = std::complex<double>(0.0, 0.5 * s);
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(jy);
    JyBasis b;
    b.vectors = es.eigenvectors();
    b.eigenvalues = es.eigenvalues().array().round();
    return b;
}

inline const JyBasis& jy_basis(int l) {
    static std::mutex mu;
    static std::map<int, std::unique_ptr<JyBasis>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto& slot = cache[l];
    if (!slot) slot = std::make_unique<JyBasis>(make_jy_basis(l));
    return *slot;
}

}  // namespace detail

// Small-d matrix d^l(beta); entry (k + l, m + l) holds d^l_{k,m}(beta).
inline Eigen::MatrixXd wigner_d_matrix(int l, double beta) {
    if (l < 0) throw std::domain_error("wigner_d: negative degree");
    if (l == 0) return Eigen::MatrixXd::Ones(1, 1);
    const auto& b = detail::jy_basis(l);
    Eigen::VectorXcd ph(2 * l + 1);
    for (int i = 0; i < 2 * l + 1; ++i) ph(i) = std::polar(1.0, -beta * b.eigenvalues(i));
    Eigen::MatrixXcd d = b.vectors * ph.asDiagonal() * b.vectors.adjoint();
    return d.real();
}

inline double wigner_d(int l, int k, int m, double beta) {
    if (l < 0) throw std::domain_error("wigner_d: negative degree");
    if (std::abs(k) > l || std::abs(m) > l) throw std::domain_error("wigner_d: |k| or |m| > l");
    return wigner_d_matrix(l, beta)(k + l, m + l);
}

// D^l_{k,m}(g) = exp(-i k alpha) d^l_{k,m}(beta) exp(-i m gamma), g = Rz(alpha) Ry(beta) Rz(gamma).
inline Eigen::MatrixXcd wigner_D_matrix(int l, const EulerAngles& e) {
    Eigen::MatrixXd d = wigner_d_matrix(l, e.beta);
    Eigen::MatrixXcd out(2 * l + 1, 2 * l + 1);
    for (int k = -l; k <= l; ++k)
        for (int m = -l; m <= l; ++m)
            out(k + l, m + l) = std::polar(1.0, -k * e.alpha - m * e.gamma) * d(k + l, m + l);
    return out;
}

inline std::complex<double> wigner_D(int l, int k, int m, const EulerAngles& e) {
    if (l < 0) throw std::domain_error("wigner_D: negative degree");
    if (std::abs(k) > l || std::abs(m) > l) throw std::domain_error("wigner_D: |k| or |m| > l");
    return std::polar(1.0, -k * e.alpha - m * e.gamma) * wigner_d_matrix(l, e.beta)(k + l, m + l);
}

}  // namespace sphera
