// SPDX-License-Identifier: Apache-2.0
#include "gs2d/image.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>

#include <png.h>

namespace gs2d {

namespace {

unsigned char to_byte(real v) {
    real scaled = std::clamp(v, 0.0, 1.0) * 255.0;
    long r = std::lround(scaled); // half away from zero
    return static_cast<unsigned char>(std::clamp(r, 0L, 255L));
}

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f)
            std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

} // namespace

Vec3 sample_bilinear(const ImageBuffer& img, NdcPos pos) {
    if (!std::isfinite(pos.x) || !std::isfinite(pos.y))
        throw std::invalid_argument("sample_bilinear: non-finite position");
    if (pos.x < -1.0 || pos.x > 1.0 || pos.y < -1.0 || pos.y > 1.0)
        throw std::invalid_argument("sample_bilinear: position outside [-1,1]^2");

    PixelPos p = ndc_to_pixel(pos, img.width, img.height);
    // Shift so integer coordinates land on pixel centers.
    real u = p.x - 0.5;
    real v = p.y - 0.5;
    real fu = std::floor(u);
    real fv = std::floor(v);
    int j0 = static_cast<int>(fu);
    int i0 = static_cast<int>(fv);
    real ax = u - fu;
    real ay = v - fv;

    auto cj = [&](int j) { return std::clamp(j, 0, img.width - 1); };
    auto ci = [&](int i) { return std::clamp(i, 0, img.height - 1); };

    Vec3 p00 = img.pixel(ci(i0), cj(j0));
    Vec3 p01 = img.pixel(ci(i0), cj(j0 + 1));
    Vec3 p10 = img.pixel(ci(i0 + 1), cj(j0));
    Vec3 p11 = img.pixel(ci(i0 + 1), cj(j0 + 1));

    Vec3 top = p00 * (1.0 - ax) + p01 * ax;
    Vec3 bot = p10 * (1.0 - ax) + p11 * ax;
    return top * (1.0 - ay) + bot * ay;
}

std::vector<real> luma_gradient_magnitude(const ImageBuffer& img) {
    if (img.width < 3 || img.height < 3)
        throw std::invalid_argument("luma_gradient_magnitude: image smaller than 3x3");

    const int w = img.width;
    const int h = img.height;
    std::vector<real> luma(static_cast<std::size_t>(w) * h);
    for (int i = 0; i < h; ++i)
        for (int j = 0; j < w; ++j) {
            Vec3 c = img.pixel(i, j);
            luma[static_cast<std::size_t>(i) * w + j] = 0.299 * c.r + 0.587 * c.g + 0.114 * c.b;
        }

    auto L = [&](int i, int j) {
        i = std::clamp(i, 0, h - 1);
        j = std::clamp(j, 0, w - 1);
        return luma[static_cast<std::size_t>(i) * w + j];
    };

    std::vector<real> mag(static_cast<std::size_t>(w) * h);
    for (int i = 0; i < h; ++i) {
        for (int j = 0; j < w; ++j) {
            real gx = -L(i - 1, j - 1) + L(i - 1, j + 1) - 2.0 * L(i, j - 1) + 2.0 * L(i, j + 1) -
                      L(i + 1, j - 1) + L(i + 1, j + 1);
            real gy = -L(i - 1, j - 1) - 2.0 * L(i - 1, j) - L(i - 1, j + 1) + L(i + 1, j - 1) +
                      2.0 * L(i + 1, j) + L(i + 1, j + 1);
            mag[static_cast<std::size_t>(i) * w + j] = std::sqrt(gx * gx + gy * gy);
        }
    }
    return mag;
}

ImageBuffer load_png(const std::string& path) {
    FilePtr fp(std::fopen(path.c_str(), "rb"));
    if (!fp)
        throw io_error("cannot open '" + path + "' for reading");

    png_byte header[8];
    if (std::fread(header, 1, 8, fp.get()) != 8 || png_sig_cmp(header, 0, 8) != 0)
        throw io_error("'" + path + "' is not a PNG file");

    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png)
        throw io_error("png_create_read_struct failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        throw io_error("png_create_info_struct failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw io_error("libpng failed while reading '" + path + "'");
    }

    png_init_io(png, fp.get());
    png_set_sig_bytes(png, 8);
    png_read_info(png, info);

    png_set_expand(png);
    png_set_strip_16(png);
    png_set_strip_alpha(png);
    png_set_gray_to_rgb(png);
    png_read_update_info(png, info);

    const int w = static_cast<int>(png_get_image_width(png, info));
    const int h = static_cast<int>(png_get_image_height(png, info));
    if (png_get_channels(png, info) != 3) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw io_error("'" + path + "': unsupported channel layout after expansion");
    }

    std::vector<png_byte> raw(static_cast<std::size_t>(w) * h * 3);
    std::vector<png_bytep> rows(h);
    for (int i = 0; i < h; ++i)
        rows[i] = raw.data() + static_cast<std::size_t>(i) * w * 3;
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);

    ImageBuffer img(w, h);
    for (std::size_t i = 0; i < raw.size(); ++i)
        img.data[i] = raw[i] / 255.0;
    return img;
}

void save_png(const ImageBuffer& img, const std::string& path) {
    FilePtr fp(std::fopen(path.c_str(), "wb"));
    if (!fp)
        throw io_error("cannot open '" + path + "' for writing");

    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png)
        throw io_error("png_create_write_struct failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        throw io_error("png_create_info_struct failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw io_error("libpng failed while writing '" + path + "'");
    }

    png_init_io(png, fp.get());
    png_set_IHDR(png, info, img.width, img.height, 8, PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);

    std::vector<png_byte> row(static_cast<std::size_t>(img.width) * 3);
    for (int i = 0; i < img.height; ++i) {
        for (int j = 0; j < img.width; ++j)
            for (int c = 0; c < 3; ++c)
                row[static_cast<std::size_t>(j) * 3 + c] = to_byte(img.at(i, j, c));
        png_write_row(png, row.data());
    }
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

void save_gray_png(const std::vector<real>& grid, int width, int height,
                   const std::string& path) {
    if (grid.size() != static_cast<std::size_t>(width) * height)
        throw std::invalid_argument("save_gray_png: grid size mismatch");

    FilePtr fp(std::fopen(path.c_str(), "wb"));
    if (!fp)
        throw io_error("cannot open '" + path + "' for writing");

    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        if (png)
            png_destroy_write_struct(&png, info ? &info : nullptr);
        throw io_error("libpng allocation failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw io_error("libpng failed while writing '" + path + "'");
    }

    png_init_io(png, fp.get());
    png_set_IHDR(png, info, width, height, 8, PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);

    std::vector<png_byte> row(width);
    for (int i = 0; i < height; ++i) {
        for (int j = 0; j < width; ++j)
            row[j] = to_byte(grid[static_cast<std::size_t>(i) * width + j]);
        png_write_row(png, row.data());
    }
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

void save_mask_png(const std::vector<unsigned char>& mask, int width, int height,
                   const std::string& path) {
    if (mask.size() != static_cast<std::size_t>(width) * height)
        throw std::invalid_argument("save_mask_png: mask size mismatch");

    FilePtr fp(std::fopen(path.c_str(), "wb"));
    if (!fp)
        throw io_error("cannot open '" + path + "' for writing");

    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        if (png)
            png_destroy_write_struct(&png, info ? &info : nullptr);
        throw io_error("libpng allocation failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw io_error("libpng failed while writing '" + path + "'");
    }

    png_init_io(png, fp.get());
    png_set_IHDR(png, info, width, height, 1, PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);

    const int stride = (width + 7) / 8;
    std::vector<png_byte> row(stride);
    for (int i = 0; i < height; ++i) {
        std::fill(row.begin(), row.end(), 0);
        for (int j = 0; j < width; ++j)
            if (mask[static_cast<std::size_t>(i) * width + j])
                row[j / 8] |= static_cast<png_byte>(0x80u >> (j % 8));
        png_write_row(png, row.data());
    }
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

void save_pgm(const std::vector<real>& grid, int width, int height, const std::string& path) {
    if (grid.size() != static_cast<std::size_t>(width) * height)
        throw std::invalid_argument("save_pgm: grid size mismatch");
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw io_error("cannot open '" + path + "' for writing");
    out << "P5\n" << width << " " << height << "\n255\n";
    for (real v : grid)
        out.put(static_cast<char>(to_byte(v)));
    if (!out)
        throw io_error("short write to '" + path + "'");
}

} // namespace gs2d
