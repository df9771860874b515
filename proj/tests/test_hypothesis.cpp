// Uniformity and symmetry tests.
#include <cmath>

#include <gtest/gtest.h>

#include <sphera/hypothesis.hpp>

using namespace sphera;

TEST(Uniformity, L1IsRayleigh) {
    auto s = sample_vmf(300, UnitVector::from_angles(1.0, 1.0), 0.3, 4);
    Vec3 m = Vec3::Zero();
    for (const auto& x : s.points) m += x.cartesian();
    m /= 300.0;
    double rayleigh = 3.0 * 300.0 * m.squaredNorm();
    auto r = test_uniformity(s, 1);
    EXPECT_NEAR(r.statistic, rayleigh, 1e-10 * rayleigh);
    EXPECT_EQ(r.df, 3);
    EXPECT_DOUBLE_EQ(r.p_value, chi2_sf(r.statistic, 3));
    EXPECT_EQ(r.reject, r.p_value < 0.05);
}

TEST(Uniformity, DegreesOfFreedomAndPower) {
    auto u = sample_uniform(2000, 1);
    for (int L = 1; L <= 4; ++L) EXPECT_EQ(test_uniformity(u, L).df, L * (L + 2));
    EXPECT_TRUE(test_uniformity(sample_watson(500, north_pole, 3.0, 2), 2).reject);
    EXPECT_EQ(test_uniformity(u, 3).components.size(), 15u);
}

TEST(Symmetry, DegreesOfFreedom) {
    auto s = sample_uniform(3000, 9);
    for (int L = 1; L <= 4; ++L) {
        EXPECT_EQ(test_rotational(s, north_pole, L).df, L * (L + 1));
        EXPECT_EQ(test_rotational(s, north_pole, L, 0.05, RotationalMode::diagonal).df, 2 * L);
        EXPECT_EQ(test_axial(s, L).df, (L + 1) * (2 * L + 3));
        EXPECT_EQ(test_equatorial(s, L).df, (L + 1) * (2 * L + 1));
        EXPECT_EQ(test_meridial(s, 0.3, L).df, L * (L + 1) / 2);
    }
    auto ax = test_axial(s, 2);
    ASSERT_FALSE(ax.notes.empty());
    EXPECT_NE(ax.notes.front().find("(L+2)L"), std::string::npos);
}

TEST(Symmetry, NullsAcceptAndAlternativesReject) {
    auto watson = sample_watson(4000, north_pole, -6.0, 21);
    EXPECT_GT(test_rotational(watson, north_pole, 2).p_value, 1e-3);
    EXPECT_GT(test_axial(watson, 2).p_value, 1e-3);
    EXPECT_GT(test_equatorial(watson, 2).p_value, 1e-3);

    auto tilted = sample_watson(4000, UnitVector::from_angles(0.5, 0.0), -6.0, 22);
    EXPECT_LT(test_rotational(tilted, north_pole, 2).p_value, 1e-6);
    EXPECT_GT(test_rotational(tilted, UnitVector::from_angles(0.5, 0.0), 2).p_value, 1e-3);
    EXPECT_GT(test_meridial(tilted, 0.0, 2).p_value, 1e-3);
    EXPECT_LT(test_meridial(tilted, 0.6, 2).p_value, 1e-6);

    auto vmf = sample_vmf(4000, UnitVector::from_angles(0.6, 0.0), 2.0, 23);
    EXPECT_LT(test_axial(vmf, 2).p_value, 1e-6);
    EXPECT_LT(test_equatorial(vmf, 2).p_value, 1e-6);
}

TEST(Symmetry, MeridialDiagonalMode) {
    auto s = sample_watson(4000, UnitVector::from_angles(0.5, 1.0), -6.0, 5);
    auto r = test_meridial(s, 1.0, 2, 0.05, MeridialMode::diagonal);
    EXPECT_EQ(r.df, 3);
    EXPECT_GT(r.p_value, 1e-3);
    EXPECT_LT(test_meridial(s, 0.2, 2, 0.05, MeridialMode::diagonal).p_value, 1e-6);
}

TEST(QuadraticFormTest, RankDeficientCovariance) {
    Eigen::MatrixXd cov(3, 3);
    cov << 2, 0, 0, 0, 1, 1, 0, 1, 1;  // rank 2
    auto q = quadratic_form({1.0, 0.5, 0.5}, cov, 10);
    EXPECT_TRUE(q.pseudo_inverse);
    EXPECT_EQ(q.rank, 2);
    // Range-space solution: 10 (1/2 + (0.5 + 0.5)^2 / 2 / 2).
    EXPECT_NEAR(q.statistic, 10 * (0.5 + 0.25), 1e-12);
    auto full = quadratic_form({1.0, 2.0}, Eigen::Matrix2d{{2.0, 0.0}, {0.0, 4.0}}, 3);
    EXPECT_EQ(full.rank, 2);
    EXPECT_NEAR(full.statistic, 3 * (0.5 + 1.0), 1e-14);
}

TEST(Hypothesis, ArgumentChecks) {
    auto s = sample_uniform(50, 1);
    EXPECT_THROW(test_uniformity(SampleSet{}, 2), std::invalid_argument);
    EXPECT_THROW(test_axial(s, 0), std::invalid_argument);
    EXPECT_THROW(test_equatorial(s, 2, 1.5), std::invalid_argument);
    auto small = test_uniformity(s, 3);
    ASSERT_FALSE(small.notes.empty());
    EXPECT_NE(small.notes.back().find("asymptotic"), std::string::npos);
}
