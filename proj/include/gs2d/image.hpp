// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "gs2d/types.hpp"

#include <string>
#include <vector>

namespace gs2d {

/// Row-major H x W x 3 RGB image with channel values in [0,1].
struct ImageBuffer {
    int width = 0;
    int height = 0;
    std::vector<real> data; // size = width * height * 3

    ImageBuffer() = default;
    ImageBuffer(int w, int h, real fill = 0.0)
        : width(w), height(h), data(static_cast<std::size_t>(w) * h * 3, fill) {}

    real& at(int row, int col, int ch) {
        return data[(static_cast<std::size_t>(row) * width + col) * 3 + ch];
    }
    real at(int row, int col, int ch) const {
        return data[(static_cast<std::size_t>(row) * width + col) * 3 + ch];
    }
    Vec3 pixel(int row, int col) const {
        std::size_t i = (static_cast<std::size_t>(row) * width + col) * 3;
        return {data[i], data[i + 1], data[i + 2]};
    }
    void set_pixel(int row, int col, const Vec3& v) {
        std::size_t i = (static_cast<std::size_t>(row) * width + col) * 3;
        data[i] = v.r;
        data[i + 1] = v.g;
        data[i + 2] = v.b;
    }
    std::size_t pixel_count() const { return static_cast<std::size_t>(width) * height; }
};

/// Bilinear sample at an NDC position. Exact on pixel centers; clamps to the
/// edge pixel outside the border-center range. Throws std::invalid_argument
/// for non-finite or out-of-range positions.
Vec3 sample_bilinear(const ImageBuffer& img, NdcPos pos);

/// Sobel gradient magnitude of the luma channel (0.299 R + 0.587 G + 0.114 B)
/// with replicate padding. Requires width, height >= 3.
std::vector<real> luma_gradient_magnitude(const ImageBuffer& img);

// 8-bit PNG I/O. Loading expands palette/gray and strips alpha; saving
// clamps to [0,1] and rounds half away from zero.
ImageBuffer load_png(const std::string& path);
void save_png(const ImageBuffer& img, const std::string& path);

/// Grayscale PNG export of a single-channel grid (values clamped to [0,1],
/// scaled by 255). `grid` is row-major height x width.
void save_gray_png(const std::vector<real>& grid, int width, int height, const std::string& path);

/// 1-bit PNG export of a binary mask (nonzero = white).
void save_mask_png(const std::vector<unsigned char>& mask, int width, int height,
                   const std::string& path);

/// Binary PGM (P5) export, same scaling as save_gray_png.
void save_pgm(const std::vector<real>& grid, int width, int height, const std::string& path);

} // namespace gs2d
