// Coefficient estimators and their covariances.
#include <cmath>

#include <gtest/gtest.h>

#include <sphera/estimation.hpp>

using namespace sphera;

TEST(Estimation, MatchesDirectAverage) {
    SampleSet s;
    for (auto [t, p] : {std::pair{0.3, 1.0}, {1.2, -2.0}, {2.9, 0.1}, {1.57, 3.0}})
        s.points.push_back(UnitVector::from_angles(t, p));
    auto est = estimate_coeffs(s, 3);
    for (int l = 0; l <= 3; ++l)
        for (int m = -l; m <= l; ++m) {
            cdouble ref{};
            for (const auto& x : s.points) ref += std::conj(sph_harm(l, m, x.angle()));
            ref /= 4.0;
            EXPECT_NEAR(std::abs(est.coeffs(l, m) - ref), 0.0, 1e-15);
        }
    EXPECT_EQ(est.coeffs(0, 0), cdouble(1.0 / std::sqrt(four_pi)));
    EXPECT_THROW(estimate_coeffs(SampleSet{}, 2), std::invalid_argument);
}

TEST(Estimation, PairCovarianceMatchesQuadrature) {
    Model m(VonMisesFisher{UnitVector::from_angles(0.8, 0.5), 1.5});
    CoefficientEstimate exact;
    exact.coeffs = m.coefficients(8);
    exact.n = 1;
    auto a = [&](int l, int mm) { return exact.coeffs(l, mm); };
    SphereGrid grid(80, 160);
    for (auto [l1, m1, l2, m2] : {std::array{1, 0, 1, 0}, {2, 1, 1, -1}, {3, -2, 2, 1}, {4, 4, 3, 2}}) {
        cdouble ref{};
        grid.for_each([&](double th, double ph, double w) {
            Angle ang(th, ph);
            ref += w * m.density(UnitVector(ang)) * std::conj(sph_harm(l1, m1, ang)) * sph_harm(l2, m2, ang);
        });
        ref -= a(l1, m1) * std::conj(a(l2, m2));
        cdouble got = estimate_pair_covariance(exact, l1, m1, l2, m2, CovarianceMode::plugin);
        EXPECT_NEAR(std::abs(got - ref), 0.0, 1e-13) << l1 << m1 << l2 << m2;
    }
    EXPECT_EQ(estimate_pair_covariance(exact, 2, 1, 2, 1, CovarianceMode::null_uniform), cdouble(1 / four_pi));
    EXPECT_THROW(estimate_pair_covariance(exact, 5, 0, 4, 0, CovarianceMode::plugin), std::invalid_argument);
}

TEST(Estimation, StandardErrorMatchesSpread) {
    Model m(Watson{north_pole, 2.0});
    auto a20 = m.coefficients(2)(2, 0).real();
    double sum = 0, sq = 0, se = 0;
    const int reps = 400;
    for (int r = 0; r < reps; ++r) {
        auto est = estimate_coeffs(sample(m, 500, 1000 + r), 2);
        double d = est.coeffs(2, 0).real() - a20;
        sum += d;
        sq += d * d;
        se += est.standard_error(2, 0);
    }
    double sd = std::sqrt(sq / reps - (sum / reps) * (sum / reps));
    EXPECT_NEAR(sd / (se / reps), 1.0, 0.1);
}

TEST(Estimation, LegendreVarianceIdentity) {
    // Var P_l(t) under Watson(2) by direct 1-D quadrature.
    auto c = Model::watson_c(2.0, 8);
    for (int l = 1; l <= 4; ++l) {
        double n = 0, d = 0, mean = 0;
        const int N = 20000;
        for (int i = 0; i <= N; ++i) {
            double t = -1 + 2.0 * i / N, w = (i == 0 || i == N) ? 1 : (i % 2 ? 4 : 2);
            double e = w * std::exp(2 * t * t), p = std::legendre(l, t);
            n += e * p * p;
            mean += e * p;
            d += e;
        }
        EXPECT_NEAR(legendre_variance(l, c), n / d - (mean / d) * (mean / d), 1e-12) << l;
    }
    // 30-digit reference values from an arbitrary-precision quadrature.
    const double ref[] = {0.728878973277822603, 0.475701319766377277, 0.465162988039429676, 0.402409193068200436};
    for (int l = 1; l <= 4; ++l) EXPECT_NEAR(std::sqrt(legendre_variance(l, c)), ref[l - 1], 1e-13) << l;
}

TEST(Estimation, RotationalEstimate) {
    auto s = sample_watson(50000, north_pole, -10.0, 8);
    auto r = estimate_c(s, 4);
    auto c = Model::watson_c(-10.0, 4);
    for (int l = 0; l <= 4; ++l) EXPECT_NEAR(r.c[l], c[l], 5 * r.std_error[l] + 1e-12) << l;
    EXPECT_EQ(r.n, 50000u);
    auto mean = estimate_mean(sample_vmf(50000, north_pole, 4.0, 2));
    EXPECT_NEAR(mean.mean.z(), 1 / std::tanh(4.0) - 0.25, 0.01);
}
