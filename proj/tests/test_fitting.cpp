// Histogram layout and the girdle pipeline.
#include <cmath>

#include <gtest/gtest.h>

#include <sphera/fitting.hpp>

using namespace sphera;

TEST(Histogram, EqualAreaLayout) {
    for (int r : {1, 4, 16}) {
        auto h = make_histogram_layout(r);
        EXPECT_EQ(h.ring_count(), 4 * r - 1);
        EXPECT_EQ(h.bin_count(), static_cast<std::size_t>(12 * r * r));
        EXPECT_DOUBLE_EQ(h.z_bounds.front(), 1.0);
        EXPECT_DOUBLE_EQ(h.z_bounds.back(), -1.0);
        // Bin area 2 pi (z_k - z_{k+1}) / sectors_k is the same for every ring.
        for (int k = 0; k < h.ring_count(); ++k)
            EXPECT_NEAR(two_pi * (h.z_bounds[k] - h.z_bounds[k + 1]) / h.sectors[k], four_pi / (12.0 * r * r), 1e-14);
    }
}

TEST(Histogram, CountsEveryPoint) {
    auto s = sample_uniform(10000, 4);
    s.points.push_back(north_pole);
    s.points.push_back(UnitVector::from_angles(pi, 0.0));
    auto h = build_histogram(s, 8);
    std::size_t total = 0;
    for (const auto& b : h.bins) total += b.count;
    EXPECT_EQ(total, s.size());
    EXPECT_EQ(h.n, s.size());
    EXPECT_EQ(histogram_ring(h, 1.0), 0);
    EXPECT_EQ(histogram_ring(h, -1.0), h.ring_count() - 1);
}

TEST(Fitting, NoiseFreeRecovery) {
    auto c = girdle_model_c(-20.0, 0.3, 10);
    auto f = fit_gamma_to(c, 0.3);
    EXPECT_NEAR(f.gamma_hat, -20.0, 1e-6);
    EXPECT_LT(f.residual, 1e-20);
    EXPECT_EQ(f.c_hat.size(), 10u);
}

TEST(Fitting, GirdleModelMatchesMixtureCoefficients) {
    auto c = girdle_model_c(-15.0, 0.4, 4);
    auto mc = Model(girdle_model(-15.0, 0.4)).mixture_c(8);
    for (int l = 1; l <= 4; ++l) EXPECT_NEAR(c[l - 1], mc[2 * l], 1e-12) << l;
}

TEST(Fitting, SyntheticPipeline) {
    auto s = sample(ModelSpec{girdle_model(-39.0022, 0.2527)}, 50000, 3);
    auto f = fit_mixture_watson(s);
    EXPECT_NEAR(f.alpha_hat, 0.2527, 0.01);
    EXPECT_NEAR(f.gamma_hat, -39.0022, 3.9);
    EXPECT_LE(f.iterations, 200);
}

TEST(Fitting, NoGirdleIsDataError) {
    EXPECT_THROW(estimate_alpha(build_histogram(sample_uniform(20000, 1), 16)), DataError);
    EXPECT_THROW(fit_mixture_watson(sample_uniform(100, 1)), std::invalid_argument);
}
