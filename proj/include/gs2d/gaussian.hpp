// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "gs2d/image.hpp"
#include "gs2d/types.hpp"

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace gs2d {

struct FittedEllipse; // geometry.hpp

/// One splatting primitive: position in NDC, scaling in pixels, rotation
/// stored in [0,1] (angle = theta01 * 2*pi), opacity-weighted color.
struct Gaussian2D {
    NdcPos mu;
    real s1 = 1.0;
    real s2 = 1.0;
    real theta01 = 0.0;
    Vec3 color; // c' = c * sigmoid(o)
};

struct GaussianSet {
    std::vector<Gaussian2D> gaussians;
    int width = 0;  // target raster size in pixels
    int height = 0;

    std::size_t size() const { return gaussians.size(); }
};

/// Sigma = (R S)(R S)^T with angle = theta01 * 2*pi. Entries returned as
/// {xx, xy, yy}. Scales must be positive.
std::array<real, 3> covariance_from_rs(real s1, real s2, real theta01);

real sigmoid(real x);

/// Scaling activation: x<0 -> 0.5*e^(0.5x); x>=0 -> 3 - 0.5*ln(1+e^(-0.5x+5)).
/// Bounded in (0,3); the two branches meet at 0 within 0.004.
real f_s(real x);

/// s = (f_s(o_sx) * e.semi_x, f_s(o_sy) * e.semi_y).
std::pair<real, real> compose_scaling(real o_sx, real o_sy, const FittedEllipse& e);

/// theta = sigmoid(logit(e_theta01) + tanh(o_theta)). e_theta01 must lie in
/// (0,1); values inside are clamped to [1e-6, 1-1e-6] before the logit.
real compose_rotation(real o_theta, real e_theta01);

/// c' = I(pos) * sigmoid(o).
Vec3 compose_color(const ImageBuffer& img, NdcPos pos, real o);

/// Convex combination of the triangle vertices; bc components must be
/// non-negative and sum to 1 within 1e-6.
NdcPos barycentric_position(const std::array<real, 3>& bc, const std::array<NdcPos, 3>& tri);

/// GaussianImage-style random initialization: mu ~ U[-1,1]^2, s ~ U[0.5,1.5]^2,
/// theta01 ~ U[0,1], c' ~ U[0,1]^3. Deterministic for a given seed.
GaussianSet random_init(std::size_t n, int width, int height, std::uint64_t seed);

// "G2DI" model container: magic, u32 version=1, u32 width, u32 height,
// u32 N, then N records of 8 little-endian f32
// (mu_x, mu_y, s1, s2, theta01, r, g, b).
void save_g2di(const GaussianSet& set, const std::string& path);
GaussianSet load_g2di(const std::string& path);

} // namespace gs2d
