// SPDX-License-Identifier: Apache-2.0
#include "gs2d/metrics.hpp"

#include "synthetic.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace gs2d;

namespace {

ImageBuffer noisy_copy(const ImageBuffer& img, double amplitude, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    ImageBuffer out = img;
    for (auto& v : out.data) {
        double u = (static_cast<double>(rng() >> 11) * 0x1.0p-53) * 2.0 - 1.0;
        v = std::clamp(v + amplitude * u, 0.0, 1.0);
    }
    return out;
}

} // namespace

TEST(Mse, IdenticalImagesAreZero) {
    ImageBuffer a = gs2d::testing::make_fbm_image(16, 16, 4);
    std::vector<double> grad;
    EXPECT_DOUBLE_EQ(mse_l2(a, a, &grad), 0.0);
    for (double g : grad)
        EXPECT_DOUBLE_EQ(g, 0.0);
}

TEST(Mse, UnitContrast) {
    ImageBuffer a(8, 8, 1.0);
    ImageBuffer b(8, 8, 0.0);
    EXPECT_DOUBLE_EQ(mse_l2(a, b), 1.0);
}

TEST(Mse, GradientMatchesFiniteDifferences) {
    ImageBuffer a = gs2d::testing::make_fbm_image(6, 5, 1);
    ImageBuffer b = gs2d::testing::make_fbm_image(6, 5, 2);
    std::vector<double> grad;
    mse_l2(a, b, &grad);

    const double h = 1e-6;
    std::mt19937_64 rng(3);
    for (int t = 0; t < 30; ++t) {
        std::size_t i = rng() % a.data.size();
        ImageBuffer ap = a, am = a;
        ap.data[i] += h;
        am.data[i] -= h;
        double fd = (mse_l2(ap, b) - mse_l2(am, b)) / (2.0 * h);
        EXPECT_NEAR(grad[i], fd, 1e-6);
    }
}

TEST(Mse, DimensionMismatchThrows) {
    ImageBuffer a(4, 4), b(5, 4);
    EXPECT_THROW(mse_l2(a, b), std::invalid_argument);
}

TEST(Psnr, LogIdentities) {
    ImageBuffer a(10, 10, 0.0);
    ImageBuffer b(10, 10, 0.1); // mse = 0.01
    EXPECT_NEAR(psnr(a, b), 20.0, 1e-9);

    ImageBuffer c(10, 10, 1.0); // mse vs a = 1
    EXPECT_NEAR(psnr(a, c), 0.0, 1e-12);

    EXPECT_TRUE(std::isinf(psnr(a, a)));
}

TEST(Psnr, DecreasesWithNoiseAmplitude) {
    ImageBuffer img = gs2d::testing::make_scene_image(48, 48, 8);
    double prev = std::numeric_limits<double>::infinity();
    for (double amp : {0.01, 0.02, 0.05, 0.1, 0.2}) {
        double p = psnr(img, noisy_copy(img, amp, 99));
        EXPECT_LT(p, prev);
        prev = p;
    }
}

TEST(Ssim, IdenticalImagesGiveOne) {
    ImageBuffer a = gs2d::testing::make_fbm_image(32, 32, 12);
    EXPECT_NEAR(ssim(a, a), 1.0, 1e-12);
    EXPECT_NEAR(d_ssim(a, a), 0.0, 1e-12);
    EXPECT_NEAR(ms_ssim(a, a), 1.0, 1e-9);
}

TEST(Ssim, DistinctImagesBelowOne) {
    ImageBuffer a = gs2d::testing::make_fbm_image(32, 32, 12);
    ImageBuffer inv = a;
    for (auto& v : inv.data)
        v = 1.0 - v;
    EXPECT_LT(ssim(a, inv), 1.0);
}

TEST(Ssim, Symmetric) {
    ImageBuffer a = gs2d::testing::make_fbm_image(24, 24, 5);
    ImageBuffer b = noisy_copy(a, 0.1, 7);
    EXPECT_NEAR(ssim(a, b), ssim(b, a), 1e-9);
}

TEST(Ssim, TooSmallThrows) {
    ImageBuffer a(8, 8, 0.5);
    EXPECT_THROW(ssim(a, a), std::invalid_argument);
    EXPECT_THROW(ms_ssim(a, a), std::invalid_argument);
}

TEST(MsSsim, FallsBackOnFewerScales) {
    // 64 px supports 3 dyadic scales (64, 32, 16); must not throw.
    ImageBuffer a = gs2d::testing::make_fbm_image(64, 64, 3);
    ImageBuffer b = noisy_copy(a, 0.05, 11);
    double v = ms_ssim(a, b);
    EXPECT_GT(v, 0.0);
    EXPECT_LE(v, 1.0);
}

TEST(RecLoss, LambdaOneIsPureL2) {
    ImageBuffer a = gs2d::testing::make_fbm_image(16, 16, 1);
    ImageBuffer b = gs2d::testing::make_fbm_image(16, 16, 2);
    EXPECT_DOUBLE_EQ(rec_loss(a, b, 1.0), mse_l2(a, b));
}

TEST(RecLoss, IdenticalImagesVanishForAnyLambda) {
    ImageBuffer a = gs2d::testing::make_fbm_image(16, 16, 6);
    for (double l : {0.0, 0.5, 0.8, 1.0})
        EXPECT_NEAR(rec_loss(a, a, l), 0.0, 1e-12);
}

TEST(RecLoss, TermByTermComposition) {
    ImageBuffer a = gs2d::testing::make_fbm_image(32, 32, 8);
    ImageBuffer b = noisy_copy(a, 0.2, 13);
    double expected = 0.8 * mse_l2(a, b) + 0.2 * d_ssim(a, b);
    EXPECT_NEAR(rec_loss(a, b, 0.8), expected, 1e-12);
}

TEST(FocalMse, IdenticalMapsAreZero) {
    ProbabilityMap p(8, 8, 0.3);
    EXPECT_DOUBLE_EQ(focal_mse(p, p, 1.0, 2.0), 0.0);
}

TEST(FocalMse, UnitDeltaValue) {
    ProbabilityMap a(8, 8, 1.0);
    ProbabilityMap b(8, 8, 0.0);
    double expected = std::pow(1.0 - std::exp(-1.0), 2.0);
    EXPECT_NEAR(focal_mse(a, b, 1.0, 2.0), expected, 1e-12);
    EXPECT_NEAR(expected, 0.3996, 5e-5);
}

TEST(FocalMse, SymmetricAndBounded) {
    ProbabilityMap a(8, 8), b(8, 8);
    std::mt19937_64 rng(17);
    for (std::size_t i = 0; i < a.values.size(); ++i) {
        a.values[i] = static_cast<double>(rng() % 1000) / 1000.0;
        b.values[i] = static_cast<double>(rng() % 1000) / 1000.0;
    }
    EXPECT_NEAR(focal_mse(a, b, 1.0, 2.0), focal_mse(b, a, 1.0, 2.0), 1e-15);
    EXPECT_GE(focal_mse(a, b, 1.0, 2.0), 0.0);
    // Weight factor never exceeds its delta = 1 value.
    double cap = std::pow(1.0 - std::exp(-1.0), 2.0);
    EXPECT_LE(focal_mse(a, b, 1.0, 2.0), cap);
}

TEST(FocalMse, DimensionMismatchThrows) {
    ProbabilityMap a(4, 4), b(4, 5);
    EXPECT_THROW(focal_mse(a, b, 1.0, 2.0), std::invalid_argument);
}
