// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace gs2d {

/// All internal math runs in double precision; file formats narrow to f32.
using real = double;

struct Vec2 {
    real x = 0.0;
    real y = 0.0;

    Vec2() = default;
    Vec2(real x_, real y_) : x(x_), y(y_) {}

    Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(real s) const { return {x * s, y * s}; }
    Vec2& operator+=(const Vec2& o) {
        x += o.x;
        y += o.y;
        return *this;
    }
    real dot(const Vec2& o) const { return x * o.x + y * o.y; }
    real norm() const { return std::sqrt(x * x + y * y); }
    real norm2() const { return x * x + y * y; }
};

inline Vec2 operator*(real s, const Vec2& v) { return v * s; }

struct Vec3 {
    real r = 0.0;
    real g = 0.0;
    real b = 0.0;

    Vec3() = default;
    Vec3(real r_, real g_, real b_) : r(r_), g(g_), b(b_) {}

    Vec3 operator+(const Vec3& o) const { return {r + o.r, g + o.g, b + o.b}; }
    Vec3 operator-(const Vec3& o) const { return {r - o.r, g - o.g, b - o.b}; }
    Vec3 operator*(real s) const { return {r * s, g * s, b * s}; }
    Vec3& operator+=(const Vec3& o) {
        r += o.r;
        g += o.g;
        b += o.b;
        return *this;
    }
    real dot(const Vec3& o) const { return r * o.r + g * o.g + b * o.b; }
};

/// Continuous pixel coordinates; pixel (row i, col j) has center (j + 0.5, i + 0.5).
struct PixelPos {
    real x = 0.0;
    real y = 0.0;
};

/// Normalized device coordinates in [-1,1]^2.
struct NdcPos {
    real x = 0.0;
    real y = 0.0;
};

inline NdcPos pixel_to_ndc(PixelPos p, int width, int height) {
    return {2.0 * (p.x / width) - 1.0, 2.0 * (p.y / height) - 1.0};
}

inline PixelPos ndc_to_pixel(NdcPos p, int width, int height) {
    return {(p.x + 1.0) * 0.5 * width, (p.y + 1.0) * 0.5 * height};
}

/// File-level failures (missing file, bad magic, truncation).
class io_error : public std::runtime_error {
  public:
    explicit io_error(const std::string& what) : std::runtime_error(what) {}
};

} // namespace gs2d
