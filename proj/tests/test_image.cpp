// SPDX-License-Identifier: Apache-2.0
#include "gs2d/image.hpp"

#include "synthetic.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>

using namespace gs2d;

namespace {

std::string temp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / name).string();
}

} // namespace

TEST(NdcPixel, RoundTripIdentity) {
    const int w = 640, h = 480;
    for (double x : {0.5, 12.25, 320.0, 639.5})
        for (double y : {0.5, 100.75, 479.5}) {
            NdcPos n = pixel_to_ndc({x, y}, w, h);
            PixelPos p = ndc_to_pixel(n, w, h);
            EXPECT_NEAR(p.x, x, 1e-6);
            EXPECT_NEAR(p.y, y, 1e-6);
        }
}

TEST(SampleBilinear, ConstantImage) {
    ImageBuffer img(7, 5, 0.5);
    for (double x : {-1.0, -0.37, 0.0, 0.99, 1.0})
        for (double y : {-1.0, 0.2, 1.0}) {
            Vec3 c = sample_bilinear(img, {x, y});
            EXPECT_DOUBLE_EQ(c.r, 0.5);
            EXPECT_DOUBLE_EQ(c.g, 0.5);
            EXPECT_DOUBLE_EQ(c.b, 0.5);
        }
}

TEST(SampleBilinear, ExactOnPixelCenters) {
    ImageBuffer img(2, 2);
    img.set_pixel(0, 0, {0.1, 0.2, 0.3});
    img.set_pixel(0, 1, {0.4, 0.5, 0.6});
    img.set_pixel(1, 0, {0.7, 0.8, 0.9});
    img.set_pixel(1, 1, {1.0, 0.0, 0.5});

    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            NdcPos pos = pixel_to_ndc({j + 0.5, i + 0.5}, 2, 2);
            Vec3 c = sample_bilinear(img, pos);
            Vec3 want = img.pixel(i, j);
            EXPECT_NEAR(c.r, want.r, 1e-12);
            EXPECT_NEAR(c.g, want.g, 1e-12);
            EXPECT_NEAR(c.b, want.b, 1e-12);
        }
}

TEST(SampleBilinear, MidpointOfTwoPixels) {
    // 2x1 image, values 0 and 1; the midpoint between centers blends 0.5/0.5.
    ImageBuffer img(2, 1);
    img.set_pixel(0, 0, {0.0, 0.0, 0.0});
    img.set_pixel(0, 1, {1.0, 1.0, 1.0});
    NdcPos mid = pixel_to_ndc({1.0, 0.5}, 2, 1);
    Vec3 c = sample_bilinear(img, mid);
    EXPECT_NEAR(c.r, 0.5, 1e-12);
}

TEST(SampleBilinear, NonFinitePositionThrows) {
    ImageBuffer img(4, 4, 0.5);
    EXPECT_THROW(sample_bilinear(img, {std::nan(""), 0.0}), std::invalid_argument);
    EXPECT_THROW(sample_bilinear(img, {0.0, std::numeric_limits<double>::infinity()}),
                 std::invalid_argument);
    EXPECT_THROW(sample_bilinear(img, {1.5, 0.0}), std::invalid_argument);
}

TEST(SampleBilinear, LipschitzContinuity) {
    ImageBuffer img = gs2d::testing::make_fbm_image(16, 16, 42);
    // Max neighbor difference bounds the slope in pixel units.
    double max_diff = 0.0;
    for (int i = 0; i < 16; ++i)
        for (int j = 0; j < 16; ++j)
            for (int c = 0; c < 3; ++c) {
                if (j + 1 < 16)
                    max_diff = std::max(max_diff, std::abs(img.at(i, j, c) - img.at(i, j + 1, c)));
                if (i + 1 < 16)
                    max_diff = std::max(max_diff, std::abs(img.at(i, j, c) - img.at(i + 1, j, c)));
            }
    const double eps_ndc = 1e-4;
    const double eps_px = eps_ndc * 16.0 / 2.0; // ndc step in pixel units
    for (double x : {-0.7, -0.1, 0.33, 0.8})
        for (double y : {-0.5, 0.05, 0.6}) {
            Vec3 a = sample_bilinear(img, {x, y});
            Vec3 b = sample_bilinear(img, {x + eps_ndc, y});
            EXPECT_LE(std::abs(a.r - b.r), 2.0 * max_diff * eps_px + 1e-12);
        }
}

TEST(LumaGradient, ConstantImageIsZero) {
    ImageBuffer img(9, 7, 0.42);
    auto g = luma_gradient_magnitude(img);
    for (double v : g)
        EXPECT_NEAR(v, 0.0, 1e-12);
}

TEST(LumaGradient, VerticalStepEdge) {
    // Columns 0..3 black, 4..7 white; Sobel with replicate padding peaks on
    // the two columns adjacent to the edge (|gx| = 4) and vanishes far away.
    ImageBuffer img(8, 8);
    for (int i = 0; i < 8; ++i)
        for (int j = 4; j < 8; ++j)
            img.set_pixel(i, j, {1.0, 1.0, 1.0});
    auto g = luma_gradient_magnitude(img);
    for (int i = 0; i < 8; ++i) {
        EXPECT_NEAR(g[i * 8 + 3], 4.0, 1e-9);
        EXPECT_NEAR(g[i * 8 + 4], 4.0, 1e-9);
        EXPECT_NEAR(g[i * 8 + 0], 0.0, 1e-12);
        EXPECT_NEAR(g[i * 8 + 7], 0.0, 1e-12);
    }
}

TEST(LumaGradient, TransposeSymmetry) {
    ImageBuffer img = gs2d::testing::make_fbm_image(12, 9, 7);
    ImageBuffer t(9, 12);
    for (int i = 0; i < 9; ++i)
        for (int j = 0; j < 12; ++j)
            for (int c = 0; c < 3; ++c)
                t.at(j, i, c) = img.at(i, j, c);
    auto g = luma_gradient_magnitude(img);
    auto gt = luma_gradient_magnitude(t);
    for (int i = 0; i < 9; ++i)
        for (int j = 0; j < 12; ++j)
            EXPECT_NEAR(g[i * 12 + j], gt[j * 9 + i], 1e-12);
}

TEST(LumaGradient, TooSmallThrows) {
    ImageBuffer img(2, 5, 0.0);
    EXPECT_THROW(luma_gradient_magnitude(img), std::invalid_argument);
}

TEST(PngIo, RoundTripIsBitExact) {
    ImageBuffer img = gs2d::testing::make_scene_image(33, 21, 5);
    // Quantize exactly as the writer does, then the file must round-trip.
    std::string path = temp_path("gs2d_test_roundtrip.png");
    save_png(img, path);
    ImageBuffer back = load_png(path);
    ASSERT_EQ(back.width, img.width);
    ASSERT_EQ(back.height, img.height);
    for (std::size_t i = 0; i < img.data.size(); ++i) {
        double quantized = std::lround(std::clamp(img.data[i], 0.0, 1.0) * 255.0) / 255.0;
        EXPECT_NEAR(back.data[i], quantized, 1e-12);
    }
    std::remove(path.c_str());
}

TEST(PngIo, MissingFileThrows) {
    EXPECT_THROW(load_png("/nonexistent/path/img.png"), io_error);
}

TEST(PngIo, GrayAndPgmExport) {
    std::vector<double> grid = {0.0, 0.25, 0.5, 0.75, 1.0, 0.1};
    std::string png = temp_path("gs2d_test_gray.png");
    std::string pgm = temp_path("gs2d_test_gray.pgm");
    save_gray_png(grid, 3, 2, png);
    save_pgm(grid, 3, 2, pgm);
    ImageBuffer back = load_png(png); // gray expands to rgb
    EXPECT_EQ(back.width, 3);
    EXPECT_EQ(back.height, 2);
    EXPECT_NEAR(back.at(0, 1, 0), 64.0 / 255.0, 1e-12); // round(0.25*255) = 64
    std::remove(png.c_str());
    std::remove(pgm.c_str());
}
