// SPDX-License-Identifier: (Apache-2.0 OR MIT)
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <mutex>
#include <shared_mutex>
#include <stdexcept>
#include <unordered_map>

#include <gmpxx.h>

namespace sphera {

namespace detail {

inline mpz_class factorial_z(int n) {
    mpz_class r;
    mpz_fac_ui(r.get_mpz_t(), static_cast<unsigned long>(n));
    return r;
}

// Racah formula in exact rational arithmetic; returns C as a double.
inline double clebsch_gordan_exact(int l1, int m1, int l2, int m2, int l, int m) {
    mpq_class sum = 0;
    int kmin = std::max({0, l2 - l - m1, l1 - l + m2});
    int kmax = std::min({l1 + l2 - l, l1 - m1, l2 + m2});
    for (int k = kmin; k <= kmax; ++k) {
        mpz_class den = factorial_z(k) * factorial_z(l1 + l2 - l - k) * factorial_z(l1 - m1 - k) *
                        factorial_z(l2 + m2 - k) * factorial_z(l - l2 + m1 + k) * factorial_z(l - l1 - m2 + k);
        mpq_class term(1, 1);
        term /= den;
        if (k % 2) sum -= term;
        else sum += term;
    }
    if (sgn(sum) == 0) return 0.0;
    mpq_class c2 = sum * sum;
    c2 *= mpq_class(mpz_class(2 * l + 1) * factorial_z(l + l1 - l2) * factorial_z(l - l1 + l2) *
                        factorial_z(l1 + l2 - l),
                    factorial_z(l1 + l2 + l + 1));
    c2 *= mpq_class(factorial_z(l + m) * factorial_z(l - m) * factorial_z(l1 - m1) * factorial_z(l1 + m1) *
                    factorial_z(l2 - m2) * factorial_z(l2 + m2));
    c2.canonicalize();
    double v = std::sqrt(c2.get_d());
    return sgn(sum) < 0 ? -v : v;
}

// Racah formula with log-factorials; used beyond the exact range.
inline double clebsch_gordan_log(int l1, int m1, int l2, int m2, int l, int m) {
    auto lf = [](int n) { return std::lgamma(n + 1.0); };
    double pref = 0.5 * (std::log(2.0 * l + 1.0) + lf(l + l1 - l2) + lf(l - l1 + l2) + lf(l1 + l2 - l) -
                         lf(l1 + l2 + l + 1) + lf(l + m) + lf(l - m) + lf(l1 - m1) + lf(l1 + m1) + lf(l2 - m2) +
                         lf(l2 + m2));
    int kmin = std::max({0, l2 - l - m1, l1 - l + m2});
    int kmax = std::min({l1 + l2 - l, l1 - m1, l2 + m2});
    long double sum = 0.0L;
    for (int k = kmin; k <= kmax; ++k) {
        double lt = pref - (lf(k) + lf(l1 + l2 - l - k) + lf(l1 - m1 - k) + lf(l2 + m2 - k) + lf(l - l2 + m1 + k) +
                            lf(l - l1 - m2 + k));
        long double t = std::exp(static_cast<long double>(lt));
        sum += (k % 2) ? -t : t;
    }
    return static_cast<double>(sum);
}

class CgCache {
  public:
    static CgCache& instance() {
        static CgCache c;
        return c;
    }
    template <class F>
    double get(std::uint64_t key, F&& compute) {
        {
            std::shared_lock lock(mu_);
            auto it = map_.find(key);
            if (it != map_.end()) return it->second;
        }
        double v = compute();
        std::unique_lock lock(mu_);
        map_.emplace(key, v);
        return v;
    }

  private:
    std::shared_mutex mu_;
    std::unordered_map<std::uint64_t, double> map_;
};

}  // namespace detail

// Largest input degree (l1, l2) computed in exact arithmetic. The floating Racah sum
// cancels badly (1e-11 near l1 + l2 = 40, 1e-8 near 90), so it only serves beyond this.
inline constexpr int cg_exact_max_degree = 200;

// Clebsch-Gordan coefficient C^{l,m}_{l1,m1; l2,m2}. Returns 0 on selection-rule
// violations; throws on malformed quantum numbers.
inline double clebsch_gordan(int l1, int m1, int l2, int m2, int l, int m) {
    if (l1 < 0 || l2 < 0 || l < 0) throw std::domain_error("clebsch_gordan: negative degree");
    if (std::abs(m1) > l1 || std::abs(m2) > l2 || std::abs(m) > l)
        throw std::domain_error("clebsch_gordan: |m| > l");
    if (m != m1 + m2) return 0.0;
    if (l < std::abs(l1 - l2) || l > l1 + l2) return 0.0;
    if (m1 == 0 && m2 == 0 && (l1 + l2 + l) % 2 == 1) return 0.0;
    if (l1 > 4000 || l2 > 4000 || l > 8000) throw std::domain_error("clebsch_gordan: degree too large");
    // Pack (l1, l2, l, m1 + l1, m2 + l2) in 13 bits each.
    std::uint64_t key = (std::uint64_t(l1) << 52) | (std::uint64_t(l2) << 39) | (std::uint64_t(l) << 26) |
          (std::uint64_t(m1 + l1) << 13) | std::uint64_t(m2 + l2);
    return detail::CgCache::instance().get(key, [&] {
        if (std::max(l1, l2) <= cg_exact_max_degree) return detail::clebsch_gordan_exact(l1, m1, l2, m2, l, m);
        return detail::clebsch_gordan_log(l1, m1, l2, m2, l, m);
    });
}

}  // namespace sphera
