// Special functions against closed forms and std:: special math.
#include <cmath>
#include <complex>

#include <gtest/gtest.h>

#include <sphera/special_fn.hpp>

using namespace sphera;

namespace {

// Composite Simpson on [a, b]; independent of the library's Gauss-Legendre rules.
template <class F>
double simpson(F f, double a, double b, int n = 20000) {
    double h = (b - a) / n, s = f(a) + f(b);
    for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
    return s * h / 3.0;
}

}  // namespace

TEST(Legendre, ClosedForms) {
    for (double x : {-1.0, -0.7, 0.0, 0.3, 1.0}) {
        EXPECT_NEAR(legendre_p(0, x), 1.0, 1e-15);
        EXPECT_NEAR(legendre_p(2, x), 0.5 * (3 * x * x - 1), 1e-15);
        EXPECT_NEAR(legendre_p(3, x), 0.5 * (5 * x * x * x - 3 * x), 1e-15);
        EXPECT_NEAR(legendre_p(7, x), std::legendre(7, x), 1e-14);
    }
    EXPECT_THROW(legendre_p(-1, 0.0), std::domain_error);
}

TEST(Harmonics, MatchesStdSphLegendre) {
    for (double th : {0.0, 0.2, 1.1, 2.5, pi}) {
        double ph = 0.83;
        auto y = sph_harm_all(20, UnitVector::from_angles(th, ph));
        for (int l = 0; l <= 20; ++l)
            for (int m = 0; m <= l; ++m) {
                cdouble ref = std::sph_legendre(l, m, th) * std::polar(1.0, m * ph);
                EXPECT_NEAR(std::abs(y[lm_index(l, m)] - ref), 0.0, 1e-12) << l << ' ' << m;
                cdouble neg = ((m % 2) ? -1.0 : 1.0) * std::conj(ref);
                EXPECT_NEAR(std::abs(y[lm_index(l, -m)] - neg), 0.0, 1e-12);
            }
    }
}

TEST(Harmonics, CondonShortleyLowDegree) {
    Angle a(0.9, 0.4);
    cdouble y11 = -std::sqrt(3.0 / (8 * pi)) * std::sin(0.9) * std::polar(1.0, 0.4);
    EXPECT_NEAR(std::abs(sph_harm(1, 1, a) - y11), 0.0, 1e-15);
    EXPECT_NEAR(sph_harm(1, 0, a).real(), std::sqrt(3.0 / (4 * pi)) * std::cos(0.9), 1e-15);
    EXPECT_THROW(sph_harm(2, 3, a), std::domain_error);
}

TEST(Harmonics, RealBasisIsCartesian) {
    auto u = UnitVector::from_angles(1.2, -2.1);
    double k = std::sqrt(3.0 / (4 * pi));
    EXPECT_NEAR(real_sph_harm(1, 1, u.angle()), k * u.x(), 1e-15);
    EXPECT_NEAR(real_sph_harm(1, -1, u.angle()), k * u.y(), 1e-15);
    EXPECT_NEAR(real_sph_harm(1, 0, u.angle()), k * u.z(), 1e-15);
}

TEST(Harmonics, UnsoldTheorem) {
    auto u = UnitVector::from_angles(2.3, 5.9);
    auto y = sph_harm_all(30, u);
    for (int l = 0; l <= 30; ++l) {
        double s = 0;
        for (int m = -l; m <= l; ++m) s += std::norm(y[lm_index(l, m)]);
        EXPECT_NEAR(s, (2 * l + 1) / (4 * pi), 1e-12);
    }
}

TEST(Quadrature, GaussLegendreExactness) {
    const auto& q = gauss_legendre(12);
    for (int p = 0; p <= 23; ++p) {
        double s = 0;
        for (std::size_t i = 0; i < q.size(); ++i) s += q.weights[i] * std::pow(q.nodes[i], p);
        double exact = p % 2 ? 0.0 : 2.0 / (p + 1);
        EXPECT_NEAR(s, exact, 1e-14) << p;
    }
    EXPECT_NEAR(SphereGrid::for_degree(4).integrate([](const UnitVector&) { return 1.0; }), 4 * pi, 1e-13);
}

TEST(Bessel, HalfIntegerClosedForms) {
    for (double k : {0.3, 2.0, 15.0}) {
        EXPECT_NEAR(bessel_i_half(0, k) / (std::sqrt(2 / (pi * k)) * std::sinh(k)), 1.0, 1e-13);
        EXPECT_NEAR(vmf_mean_resultant(k), 1 / std::tanh(k) - 1 / k, 1e-14);
        double i1 = std::sqrt(2 / (pi * k)) * (std::cosh(k) - std::sinh(k) / k);
        EXPECT_NEAR(bessel_i_half(1, k) / i1, 1.0, 1e-12);
    }
    EXPECT_NEAR(vmf_mean_resultant(1e-6), 1e-6 / 3, 1e-18);
    EXPECT_NEAR(log_bessel_i_half(0, 800.0), 800.0 + 0.5 * std::log(2 / (pi * 800.0)) - std::log(2.0), 1e-12);
    EXPECT_DOUBLE_EQ(sph_bessel_j(0, 0.0), 1.0);
    EXPECT_NEAR(sph_bessel_j(1, 2.0), std::sin(2.0) / 4 - std::cos(2.0) / 2, 1e-15);
}

TEST(Kummer, HalfThreeHalvesIsMeanOfExp) {
    for (double g : {-50.0, -2.0, 0.0, 0.7, 2.0, 30.0}) {
        double ref = simpson([&](double t) { return std::exp(g * t * t); }, 0.0, 1.0);
        EXPECT_NEAR(kummer_m(g) / ref, 1.0, 1e-11) << g;
    }
}

TEST(ChiSquare, ClosedForms) {
    for (double x : {0.1, 1.0, 3.841458820694124, 20.0}) {
        EXPECT_NEAR(chi2_sf(x, 2), std::exp(-x / 2), 1e-14);
        EXPECT_NEAR(chi2_sf(x, 1), std::erfc(std::sqrt(x / 2)), 1e-14);
        EXPECT_NEAR(chi2_sf(x, 4), std::exp(-x / 2) * (1 + x / 2), 1e-14);
    }
    EXPECT_NEAR(chi2_sf(3.841458820694124, 1), 0.05, 1e-12);
    EXPECT_THROW(chi2_sf(1.0, 0), std::domain_error);
}

TEST(ClebschGordan, KnownValues) {
    EXPECT_NEAR(clebsch_gordan(1, 0, 1, 0, 2, 0), std::sqrt(2.0 / 3.0), 1e-15);
    EXPECT_NEAR(clebsch_gordan(1, 0, 1, 0, 0, 0), -std::sqrt(1.0 / 3.0), 1e-15);
    EXPECT_NEAR(clebsch_gordan(1, 1, 1, -1, 1, 0), std::sqrt(0.5), 1e-15);
    EXPECT_NEAR(clebsch_gordan(1, 0, 1, 0, 1, 0), 0.0, 1e-15);
    EXPECT_EQ(clebsch_gordan(2, 1, 2, 1, 1, 1), 0.0);  // m mismatch
    EXPECT_EQ(clebsch_gordan(1, 0, 1, 0, 3, 0), 0.0);  // triangle
}

TEST(ClebschGordan, OrthogonalityAndLogPath) {
    for (int l1 : {3, 20, 45}) {
        int l2 = l1 - 1;
        for (int m = -2; m <= 2; ++m)
            for (int l = std::abs(l1 - l2); l <= l1 + l2; ++l)
                for (int lp = l; lp <= std::min(l + 2, l1 + l2); ++lp) {
                    if (std::abs(m) > l || std::abs(m) > lp) continue;
                    double s = 0;
                    for (int m1 = -l1; m1 <= l1; ++m1) {
                        int m2 = m - m1;
                        if (std::abs(m2) > l2) continue;
                        s += clebsch_gordan(l1, m1, l2, m2, l, m) * clebsch_gordan(l1, m1, l2, m2, lp, m);
                    }
                    EXPECT_NEAR(s, l == lp ? 1.0 : 0.0, 1e-13);
                }
    }
    EXPECT_NEAR(detail::clebsch_gordan_log(12, 3, 9, -1, 15, 2), detail::clebsch_gordan_exact(12, 3, 9, -1, 15, 2),
                1e-13);
}

TEST(Wigner, SmallDClosedForm) {
    double b = 0.7, c = std::cos(b), s = std::sin(b);
    EXPECT_NEAR(wigner_d(1, 1, 1, b), 0.5 * (1 + c), 1e-14);
    EXPECT_NEAR(wigner_d(1, 1, 0, b), -s / std::sqrt(2.0), 1e-14);
    EXPECT_NEAR(wigner_d(1, 0, 0, b), c, 1e-14);
    EXPECT_NEAR(wigner_d(1, -1, 1, b), 0.5 * (1 - c), 1e-14);
    EXPECT_NEAR(wigner_d(2, 0, 0, b), legendre_p(2, c), 1e-14);
}

TEST(Wigner, UnitaryAndHomomorphism) {
    EulerAngles g1{0.3, 1.1, -0.4}, g2{2.0, 0.5, 1.3};
    Mat3 r12 = rotation_matrix(g1) * rotation_matrix(g2);
    EulerAngles g12 = euler_from_matrix(r12);
    for (int l : {1, 5, 20}) {
        Eigen::MatrixXcd d1 = wigner_D_matrix(l, g1), d2 = wigner_D_matrix(l, g2);
        Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(2 * l + 1, 2 * l + 1);
        EXPECT_LT((d1 * d1.adjoint() - id).cwiseAbs().maxCoeff(), 1e-12);
        EXPECT_LT((d1 * d2 - wigner_D_matrix(l, g12)).cwiseAbs().maxCoeff(), 1e-11) << l;
    }
}

TEST(Wigner, AdditionTheorem) {
    auto a = UnitVector::from_angles(0.4, 1.0), b = UnitVector::from_angles(2.0, -0.5);
    for (int l : {1, 7, 20}) {
        auto ya = sph_harm_all(l, a), yb = sph_harm_all(l, b);
        cdouble s{};
        for (int m = -l; m <= l; ++m) s += ya[lm_index(l, m)] * std::conj(yb[lm_index(l, m)]);
        EXPECT_NEAR(s.real(), (2 * l + 1) / (4 * pi) * legendre_p(l, a.dot(b)), 1e-12);
        EXPECT_NEAR(s.imag(), 0.0, 1e-12);
    }
}

TEST(Geometry, EulerRoundTrip) {
    for (EulerAngles e : {EulerAngles{0.3, 1.1, -0.4}, EulerAngles{1.0, 0.0, 0.5}, EulerAngles{0.2, pi, 0.1}}) {
        Mat3 r = rotation_matrix(e);
        EXPECT_TRUE(is_orthonormal(r));
        EXPECT_LT((rotation_matrix(euler_from_matrix(r)) - r).cwiseAbs().maxCoeff(), 1e-12);
    }
    auto ax = UnitVector::from_angles(0.8, 2.2);
    EXPECT_NEAR(rotate(rotation_to_north(ax), ax).z(), 1.0, 1e-15);
    EXPECT_THROW(Angle(std::nan(""), 0.0), std::domain_error);
}
