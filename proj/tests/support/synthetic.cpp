// SPDX-License-Identifier: Apache-2.0
#include "synthetic.hpp"

#include <algorithm>
#include <cmath>

namespace gs2d::testing {

namespace {

std::uint64_t splitmix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

double lattice(std::uint64_t seed, int ix, int iy, int ch) {
    std::uint64_t h = splitmix(seed ^ (static_cast<std::uint64_t>(ix) << 32) ^
                               (static_cast<std::uint64_t>(static_cast<std::uint32_t>(iy)) << 8) ^
                               static_cast<std::uint64_t>(ch));
    return static_cast<double>(h >> 11) * 0x1.0p-53;
}

double smooth(double t) { return t * t * (3.0 - 2.0 * t); }

double value_noise(std::uint64_t seed, double x, double y, int ch) {
    int ix = static_cast<int>(std::floor(x));
    int iy = static_cast<int>(std::floor(y));
    double fx = smooth(x - ix);
    double fy = smooth(y - iy);
    double v00 = lattice(seed, ix, iy, ch);
    double v10 = lattice(seed, ix + 1, iy, ch);
    double v01 = lattice(seed, ix, iy + 1, ch);
    double v11 = lattice(seed, ix + 1, iy + 1, ch);
    return (v00 * (1 - fx) + v10 * fx) * (1 - fy) + (v01 * (1 - fx) + v11 * fx) * fy;
}

double fbm(std::uint64_t seed, double x, double y, int ch, int octaves, double base_scale) {
    double amp = 0.5;
    double sum = 0.0;
    double norm = 0.0;
    double scale = base_scale;
    for (int o = 0; o < octaves; ++o) {
        sum += amp * value_noise(seed + o * 1315423911ull, x * scale, y * scale, ch);
        norm += amp;
        amp *= 0.55;
        scale *= 2.0;
    }
    return sum / norm;
}

} // namespace

ImageBuffer make_fbm_image(int width, int height, std::uint64_t seed) {
    ImageBuffer img(width, height);
    for (int i = 0; i < height; ++i)
        for (int j = 0; j < width; ++j) {
            double x = static_cast<double>(j) / width;
            double y = static_cast<double>(i) / height;
            double base = fbm(seed, x, y, 0, 6, 3.0);
            double tint = fbm(seed + 77, x, y, 1, 4, 2.0);
            img.at(i, j, 0) = std::clamp(0.15 + 0.8 * base, 0.0, 1.0);
            img.at(i, j, 1) = std::clamp(0.10 + 0.7 * base + 0.15 * tint, 0.0, 1.0);
            img.at(i, j, 2) = std::clamp(0.20 + 0.55 * base + 0.25 * (1.0 - tint), 0.0, 1.0);
        }
    return img;
}

ImageBuffer make_scene_image(int width, int height, std::uint64_t seed) {
    ImageBuffer img(width, height);
    double sun_x = 0.72 * width;
    double sun_y = 0.25 * height;
    double sun_r = 0.09 * std::min(width, height);
    for (int i = 0; i < height; ++i) {
        for (int j = 0; j < width; ++j) {
            double x = static_cast<double>(j) / width;
            double y = static_cast<double>(i) / height;

            // Sky gradient with a soft sun disk.
            double r = 0.45 + 0.35 * (1.0 - y);
            double g = 0.55 + 0.25 * (1.0 - y);
            double b = 0.75 + 0.2 * (1.0 - y);
            double dd = std::hypot(j + 0.5 - sun_x, i + 0.5 - sun_y);
            double sun = std::clamp(1.0 - (dd - sun_r) / (0.35 * sun_r), 0.0, 1.0);
            r += 0.35 * sun;
            g += 0.28 * sun;

            // Ridge line from low-frequency noise.
            double ridge = 0.55 + 0.18 * (fbm(seed, x, 0.0, 0, 3, 2.0) - 0.5);
            if (y > ridge) {
                double t = fbm(seed + 5, x, y, 1, 6, 6.0);
                double shade = 0.25 + 0.5 * t;
                r = shade * 0.55;
                g = shade * 0.75;
                b = shade * 0.35;
            } else if (y > ridge - 0.015) {
                r *= 0.55;
                g *= 0.55;
                b *= 0.5;
            }

            img.at(i, j, 0) = std::clamp(r, 0.0, 1.0);
            img.at(i, j, 1) = std::clamp(g, 0.0, 1.0);
            img.at(i, j, 2) = std::clamp(b, 0.0, 1.0);
        }
    }
    return img;
}

ImageBuffer make_mixed_image(int width, int height, std::uint64_t seed) {
    ImageBuffer img(width, height);
    for (int i = 0; i < height; ++i)
        for (int j = 0; j < width; ++j) {
            double x = static_cast<double>(j) / width;
            double y = static_cast<double>(i) / height;
            double blend = smooth(std::clamp((x - 0.35) / 0.3, 0.0, 1.0));
            double flat = 0.3 + 0.35 * y + 0.1 * x;
            double busy = fbm(seed + 9, x, y, 2, 7, 10.0);
            double v = (1.0 - blend) * flat + blend * busy;
            img.at(i, j, 0) = std::clamp(v, 0.0, 1.0);
            img.at(i, j, 1) = std::clamp(0.85 * v + 0.1 * blend, 0.0, 1.0);
            img.at(i, j, 2) = std::clamp(0.7 * v + 0.15 * (1.0 - blend), 0.0, 1.0);
        }
    return img;
}

std::vector<ImageBuffer> make_corpus() {
    return {make_fbm_image(192, 192, 1001), make_scene_image(192, 192, 2002),
            make_mixed_image(192, 192, 3003)};
}

ImageBuffer make_fit_crop() {
    ImageBuffer big = make_scene_image(192, 192, 2002);
    ImageBuffer crop(128, 128);
    for (int i = 0; i < 128; ++i)
        for (int j = 0; j < 128; ++j)
            for (int c = 0; c < 3; ++c)
                crop.at(i, j, c) = big.at(i + 32, j + 32, c);
    return crop;
}

ImageBuffer brute_force_render(const GaussianSet& set) {
    constexpr double kTwoPi = 6.283185307179586476925286766559;
    ImageBuffer out(set.width, set.height, 0.0);
    for (const auto& g : set.gaussians) {
        PixelPos mu = ndc_to_pixel({g.mu.x, g.mu.y}, set.width, set.height);
        double angle = g.theta01 * kTwoPi;
        double c = std::cos(angle), s = std::sin(angle);
        double i1 = 1.0 / (g.s1 * g.s1), i2 = 1.0 / (g.s2 * g.s2);
        for (int i = 0; i < set.height; ++i) {
            double dy = (i + 0.5) - mu.y;
            for (int j = 0; j < set.width; ++j) {
                double dx = (j + 0.5) - mu.x;
                double e1 = c * dx + s * dy;
                double e2 = -s * dx + c * dy;
                double sigma = 0.5 * (e1 * e1 * i1 + e2 * e2 * i2);
                double w = std::exp(-sigma);
                out.at(i, j, 0) += g.color.r * w;
                out.at(i, j, 1) += g.color.g * w;
                out.at(i, j, 2) += g.color.b * w;
            }
        }
    }
    return out;
}

double brute_force_loss(const GaussianSet& set, const ImageBuffer& d_out) {
    ImageBuffer rendered = brute_force_render(set);
    double loss = 0.0;
    for (std::size_t i = 0; i < rendered.data.size(); ++i)
        loss += rendered.data[i] * d_out.data[i];
    return loss;
}

} // namespace gs2d::testing
