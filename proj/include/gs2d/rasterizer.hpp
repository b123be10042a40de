// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "gs2d/gaussian.hpp"
#include "gs2d/image.hpp"

#include <vector>

namespace gs2d {

/// Per-gaussian gradients, same order as the set. Entries stay zero for
/// gaussians whose footprint misses every pixel.
struct RenderGrads {
    std::vector<Vec2> d_mu;    // wrt NDC position
    std::vector<Vec2> d_s;     // wrt (s1, s2)
    std::vector<real> d_theta; // wrt theta01
    std::vector<Vec3> d_color; // wrt c'

    void resize(std::size_t n) {
        d_mu.assign(n, {});
        d_s.assign(n, {});
        d_theta.assign(n, 0.0);
        d_color.assign(n, {});
    }
};

struct RenderOptions {
    real cutoff_sigma = 3.0; // footprint radius in whitened units
};

/// Half-open pixel rectangle [x0,x1) x [y0,y1).
struct PixelRect {
    int x0 = 0;
    int y0 = 0;
    int x1 = 0;
    int y1 = 0;

    bool empty() const { return x1 <= x0 || y1 <= y0; }
    long long area() const { return empty() ? 0 : static_cast<long long>(x1 - x0) * (y1 - y0); }
};

/// Conservative pixel box containing every pixel center within
/// cutoff_sigma of the gaussian (Mahalanobis), clamped to the raster.
PixelRect footprint_bbox(const Gaussian2D& g, real cutoff_sigma, int width, int height);

/// Accumulated blending: per pixel, sum of c' * exp(-sigma) over gaussians
/// whose footprint box covers the pixel. No sorting, no alpha saturation;
/// output may exceed 1. Bit-identical across thread counts.
ImageBuffer render(const GaussianSet& set, const RenderOptions& opts = {});

/// Gradients of L = sum over pixels of d_out . C for the render above.
/// d_out must match the set's raster size. Matches central finite
/// differences; reduction order is fixed, so results are bit-identical
/// across thread counts.
RenderGrads render_backward(const GaussianSet& set, const ImageBuffer& d_out,
                            const RenderOptions& opts = {});

} // namespace gs2d
