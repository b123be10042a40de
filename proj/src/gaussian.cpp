// SPDX-License-Identifier: Apache-2.0
#include "gs2d/gaussian.hpp"

#include "gs2d/geometry.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <random>

namespace gs2d {

namespace {

constexpr real kTwoPi = 6.283185307179586476925286766559;

real uniform01(std::mt19937_64& rng) {
    // 53-bit mantissa draw; avoids distribution differences across stdlibs.
    return static_cast<real>(rng() >> 11) * 0x1.0p-53;
}

void write_f32(std::ofstream& out, float v) {
    static_assert(sizeof(float) == 4);
    char buf[4];
    std::memcpy(buf, &v, 4);
    out.write(buf, 4);
}

void write_u32(std::ofstream& out, std::uint32_t v) {
    char buf[4] = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
                   static_cast<char>((v >> 16) & 0xff), static_cast<char>((v >> 24) & 0xff)};
    out.write(buf, 4);
}

std::uint32_t read_u32(std::ifstream& in, const std::string& path, std::size_t offset) {
    unsigned char buf[4];
    if (!in.read(reinterpret_cast<char*>(buf), 4))
        throw io_error("'" + path + "': truncated at byte " + std::to_string(offset));
    return static_cast<std::uint32_t>(buf[0]) | (static_cast<std::uint32_t>(buf[1]) << 8) |
           (static_cast<std::uint32_t>(buf[2]) << 16) | (static_cast<std::uint32_t>(buf[3]) << 24);
}

} // namespace

std::array<real, 3> covariance_from_rs(real s1, real s2, real theta01) {
    if (!(s1 > 0.0) || !(s2 > 0.0))
        throw std::invalid_argument("covariance_from_rs: scales must be positive");
    if (!std::isfinite(theta01))
        throw std::invalid_argument("covariance_from_rs: non-finite rotation");

    real angle = theta01 * kTwoPi;
    real c = std::cos(angle);
    real s = std::sin(angle);
    real a = s1 * s1;
    real b = s2 * s2;
    // R diag(s1^2, s2^2) R^T
    return {a * c * c + b * s * s, (a - b) * s * c, a * s * s + b * c * c};
}

real sigmoid(real x) { return 1.0 / (1.0 + std::exp(-x)); }

real f_s(real x) {
    if (x < 0.0)
        return 0.5 * std::exp(0.5 * x);
    return 3.0 - 0.5 * std::log1p(std::exp(-0.5 * x + 5.0));
}

std::pair<real, real> compose_scaling(real o_sx, real o_sy, const FittedEllipse& e) {
    if (!(e.semi_x > 0.0) || !(e.semi_y > 0.0))
        throw std::invalid_argument("compose_scaling: degenerate ellipse axes");
    return {f_s(o_sx) * e.semi_x, f_s(o_sy) * e.semi_y};
}

real compose_rotation(real o_theta, real e_theta01) {
    if (e_theta01 <= 0.0 || e_theta01 >= 1.0)
        throw std::invalid_argument("compose_rotation: reference angle must lie in (0,1)");
    constexpr real eps = 1e-6;
    real t = std::clamp(e_theta01, eps, 1.0 - eps);
    real logit = std::log(t / (1.0 - t));
    return sigmoid(logit + std::tanh(o_theta));
}

Vec3 compose_color(const ImageBuffer& img, NdcPos pos, real o) {
    return sample_bilinear(img, pos) * sigmoid(o);
}

NdcPos barycentric_position(const std::array<real, 3>& bc, const std::array<NdcPos, 3>& tri) {
    real sum = bc[0] + bc[1] + bc[2];
    if (bc[0] < 0.0 || bc[1] < 0.0 || bc[2] < 0.0 || std::abs(sum - 1.0) > 1e-6)
        throw std::invalid_argument("barycentric_position: not a convex combination");
    return {bc[0] * tri[0].x + bc[1] * tri[1].x + bc[2] * tri[2].x,
            bc[0] * tri[0].y + bc[1] * tri[1].y + bc[2] * tri[2].y};
}

GaussianSet random_init(std::size_t n, int width, int height, std::uint64_t seed) {
    if (n == 0)
        throw std::invalid_argument("random_init: n must be >= 1");
    std::mt19937_64 rng(seed);
    GaussianSet set;
    set.width = width;
    set.height = height;
    set.gaussians.resize(n);
    for (auto& g : set.gaussians) {
        g.mu.x = uniform01(rng) * 2.0 - 1.0;
        g.mu.y = uniform01(rng) * 2.0 - 1.0;
        g.s1 = 0.5 + uniform01(rng);
        g.s2 = 0.5 + uniform01(rng);
        g.theta01 = uniform01(rng);
        g.color = {uniform01(rng), uniform01(rng), uniform01(rng)};
    }
    return set;
}

void save_g2di(const GaussianSet& set, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw io_error("cannot open '" + path + "' for writing");
    out.write("G2DI", 4);
    write_u32(out, 1);
    write_u32(out, static_cast<std::uint32_t>(set.width));
    write_u32(out, static_cast<std::uint32_t>(set.height));
    write_u32(out, static_cast<std::uint32_t>(set.gaussians.size()));
    for (const auto& g : set.gaussians) {
        write_f32(out, static_cast<float>(g.mu.x));
        write_f32(out, static_cast<float>(g.mu.y));
        write_f32(out, static_cast<float>(g.s1));
        write_f32(out, static_cast<float>(g.s2));
        write_f32(out, static_cast<float>(g.theta01));
        write_f32(out, static_cast<float>(g.color.r));
        write_f32(out, static_cast<float>(g.color.g));
        write_f32(out, static_cast<float>(g.color.b));
    }
    if (!out)
        throw io_error("short write to '" + path + "'");
}

GaussianSet load_g2di(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw io_error("cannot open '" + path + "' for reading");

    char magic[4];
    if (!in.read(magic, 4))
        throw io_error("'" + path + "': truncated at byte 0");
    if (std::memcmp(magic, "G2DI", 4) != 0)
        throw io_error("'" + path + "': bad magic");

    std::uint32_t version = read_u32(in, path, 4);
    if (version != 1)
        throw io_error("'" + path + "': unsupported version " + std::to_string(version));
    std::uint32_t w = read_u32(in, path, 8);
    std::uint32_t h = read_u32(in, path, 12);
    std::uint32_t n = read_u32(in, path, 16);
    if (w == 0 || h == 0)
        throw io_error("'" + path + "': zero raster size");
    if (n == 0)
        throw io_error("'" + path + "': empty gaussian set");

    GaussianSet set;
    set.width = static_cast<int>(w);
    set.height = static_cast<int>(h);
    set.gaussians.resize(n);
    for (std::uint32_t i = 0; i < n; ++i) {
        float rec[8];
        if (!in.read(reinterpret_cast<char*>(rec), sizeof(rec)))
            throw io_error("'" + path + "': truncated at byte " +
                           std::to_string(20 + static_cast<std::size_t>(i) * 32));
        auto& g = set.gaussians[i];
        g.mu = {rec[0], rec[1]};
        g.s1 = rec[2];
        g.s2 = rec[3];
        g.theta01 = rec[4];
        g.color = {rec[5], rec[6], rec[7]};
    }
    return set;
}

} // namespace gs2d
