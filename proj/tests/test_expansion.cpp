// Projection, evaluation, rotation and products of harmonic expansions.
#include <cmath>

#include <gtest/gtest.h>

#include <sphera/expansion.hpp>
#include <sphera/models.hpp>

using namespace sphera;

namespace {

HarmonicCoefficients band_limited(int L) {
    HarmonicCoefficients c(L);
    c(0, 0) = 1.0 / std::sqrt(four_pi);
    for (int l = 1; l <= L; ++l)
        for (int m = 0; m <= l; ++m) {
            cdouble a(0.02 * std::cos(1.0 + l + 3.0 * m), m == 0 ? 0.0 : 0.015 * std::sin(2.0 * l - m));
            c(l, m) = a;
            if (m > 0) c(l, -m) = ((m % 2) ? -1.0 : 1.0) * std::conj(a);
        }
    return c;
}

}  // namespace

TEST(Expansion, ProjectReproducesBandLimited) {
    auto c = band_limited(8);
    auto p = project([&](const UnitVector& x) { return evaluate(c, x); }, 8);
    EXPECT_LT(p.coeffs.max_abs_difference(c), 1e-14);
    EXPECT_FALSE(p.normalization_warning);
}

TEST(Expansion, EvaluateMatchesDirectSum) {
    auto c = band_limited(5);
    auto x = UnitVector::from_angles(0.9, 2.7);
    cdouble s{};
    for (int l = 0; l <= 5; ++l)
        for (int m = -l; m <= l; ++m) s += c(l, m) * sph_harm(l, m, x.angle());
    EXPECT_NEAR(evaluate(c, x), s.real(), 1e-15);
    HarmonicCoefficients bad(1);
    bad(1, 1) = cdouble(0.0, 0.3);  // no conjugate partner
    EXPECT_THROW(evaluate(bad, x), std::invalid_argument);
}

TEST(Expansion, RealComplexRoundTrip) {
    auto c = band_limited(6);
    auto r = to_real(c);
    EXPECT_EQ(r.basis(), Basis::real);
    EXPECT_LT(r.max_imaginary(), 1e-17);
    EXPECT_LT(to_complex(r).max_abs_difference(c), 1e-16);
    // f = sum a_{l,m} Y_{l,m} in the real basis.
    auto x = UnitVector::from_angles(2.0, -1.0);
    double s = 0;
    for (int l = 0; l <= 6; ++l)
        for (int m = -l; m <= l; ++m) s += r(l, m).real() * real_sph_harm(l, m, x.angle());
    EXPECT_NEAR(s, evaluate(c, x), 1e-15);
}

TEST(Expansion, RotationMatchesRotatedDensity) {
    auto c = band_limited(6);
    EulerAngles g{0.4, 1.3, -0.9};
    Mat3 r = rotation_matrix(g);
    auto direct = project([&](const UnitVector& x) { return evaluate(c, rotate(r.transpose(), x)); }, 6);
    EXPECT_LT(rotate(c, g).max_abs_difference(direct.coeffs), 1e-13);
    EulerAngles inv = euler_from_matrix(r.transpose());
    EXPECT_LT(rotate(rotate(c, g), inv).max_abs_difference(c), 1e-13);
}

TEST(Expansion, SquareExpandMatchesQuadrature) {
    for (int l = 0; l <= 4; ++l)
        for (int m = -l; m <= l; ++m) {
            HarmonicCoefficients b(l);
            b(l, m) = 1.0;  // f = Y_l^m, squared modulus
            auto sq = square_expand(b);
            auto ref = project([&](const UnitVector& x) { return std::norm(sph_harm(l, m, x.angle())); }, 2 * l);
            EXPECT_LT(sq.max_abs_difference(ref.coeffs), 1e-13) << l << ' ' << m;
        }
}

TEST(Expansion, MeanAndInertia) {
    // vMF(kappa) about mu: E[X] = A(kappa) mu, closed form.
    auto mu = UnitVector::from_angles(0.7, 2.0);
    Model m(VonMisesFisher{mu, 3.0});
    auto s = inertia(m.coefficients(2));
    double a = 1 / std::tanh(3.0) - 1 / 3.0;
    EXPECT_LT((s.mean - a * mu.cartesian()).norm(), 1e-13);
    EXPECT_NEAR(s.inertia.trace(), 1.0, 1e-13);
    // E[(mu.X)^2] = 1 - 2A/kappa for vMF.
    EXPECT_NEAR(mu.cartesian().dot(s.inertia * mu.cartesian()), 1 - 2 * a / 3.0, 1e-13);
    auto u = mean_direction(HarmonicCoefficients::uniform(1));
    EXPECT_FALSE(u.mean_defined);
}

TEST(Expansion, SymmetryPatterns) {
    Model w(Watson{north_pole, 2.0});
    auto c = w.coefficients(6);
    EXPECT_TRUE(symmetry_pattern(c, SymmetryKind::rotational_north).holds);
    EXPECT_TRUE(symmetry_pattern(c, SymmetryKind::axial).holds);
    EXPECT_TRUE(symmetry_pattern(c, SymmetryKind::equatorial).holds);
    EXPECT_FALSE(symmetry_pattern(c, SymmetryKind::uniform).holds);
    Model v(VonMisesFisher{UnitVector::from_angles(1.0, 0.4), 2.0});
    auto cv = v.coefficients(6);
    EXPECT_FALSE(symmetry_pattern(cv, SymmetryKind::axial).holds);
    EXPECT_TRUE(symmetry_pattern(cv, SymmetryKind::meridial, 1e-12, 0.4).holds);
    EXPECT_FALSE(symmetry_pattern(cv, SymmetryKind::meridial, 1e-8, 0.0).holds);
}
