// SPDX-License-Identifier: (Apache-2.0 OR MIT)
#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include "harmonics.hpp"

namespace sphera {

enum class Basis { complex, real };

inline const char* to_string(Basis b) { return b == Basis::complex ? "complex" : "real"; }

// Triangular array a_l^m, 0 <= l <= L, -l <= m <= l, stored at lm_index(l, m).
// Both signs of m are stored: products and rotations of general (non-real)
// expansions need them, and conjugate symmetry is checked where it is required.
class HarmonicCoefficients {
  public:
    explicit HarmonicCoefficients(int max_degree = 0, Basis basis = Basis::complex)
        : lmax_(max_degree), basis_(basis) {
        if (max_degree < 0) throw std::domain_error("HarmonicCoefficients: negative degree");
        data_.assign(lm_count(max_degree), cdouble{});
    }

    // Coefficients of the uniform density.
    static HarmonicCoefficients uniform(int max_degree = 0, Basis basis = Basis::complex) {
        HarmonicCoefficients c(max_degree, basis);
        c(0, 0) = 1.0 / std::sqrt(four_pi);
        return c;
    }

    int max_degree() const { return lmax_; }
    Basis basis() const { return basis_; }

    cdouble operator()(int l, int m) const { return data_[lm_index(l, m)]; }
    cdouble& operator()(int l, int m) { return data_[lm_index(l, m)]; }

    // Checked read; degrees above max_degree read as zero.
    cdouble at(int l, int m) const {
        check_lm("HarmonicCoefficients::at", l, m);
        return l > lmax_ ? cdouble{} : data_[lm_index(l, m)];
    }

    const std::vector<cdouble>& data() const { return data_; }
    std::vector<cdouble>& data() { return data_; }

    // max |conj(a_l^m) - (-1)^m a_l^{-m}| over the array.
    double conjugate_symmetry_violation() const {
        double v = 0.0;
        for (int l = 0; l <= lmax_; ++l)
            for (int m = 0; m <= l; ++m) {
                double s = (m % 2) ? -1.0 : 1.0;
                v = std::max(v, std::abs(std::conj((*this)(l, m)) - s * (*this)(l, -m)));
            }
        return v;
    }

    // Largest |Im| over entries; real-basis coefficients must be real.
    double max_imaginary() const {
        double v = 0.0;
        for (const auto& a : data_) v = std::max(v, std::abs(a.imag()));
        return v;
    }

    // Copy cut or zero-padded to degree L.
    HarmonicCoefficients resized(int L) const {
        HarmonicCoefficients out(L, basis_);
        for (int l = 0; l <= std::min(L, lmax_); ++l)
            for (int m = -l; m <= l; ++m) out(l, m) = (*this)(l, m);
        return out;
    }

    // sum_m |a_l^m|^2
    double degree_power(int l) const {
        double s = 0.0;
        for (int m = -l; m <= l; ++m) s += std::norm((*this)(l, m));
        return s;
    }

    double max_abs_difference(const HarmonicCoefficients& o) const {
        int L = std::max(lmax_, o.lmax_);
        double v = 0.0;
        for (int l = 0; l <= L; ++l)
            for (int m = -l; m <= l; ++m) v = std::max(v, std::abs(at(l, m) - o.at(l, m)));
        return v;
    }

  private:
    int lmax_;
    Basis basis_;
    std::vector<cdouble> data_;
};

}  // namespace sphera
