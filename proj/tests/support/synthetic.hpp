// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "gs2d/gaussian.hpp"
#include "gs2d/image.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace gs2d::testing {

/// Multi-octave value noise; 1/f-ish spectrum similar to photographic content.
ImageBuffer make_fbm_image(int width, int height, std::uint64_t seed);

/// Sky gradient, sun disk, ridge line and a textured foreground.
ImageBuffer make_scene_image(int width, int height, std::uint64_t seed);

/// Smooth left half against a high-detail right half; exercises the
/// self-adaptive density behavior.
ImageBuffer make_mixed_image(int width, int height, std::uint64_t seed);

/// The three bundled natural-style test images (192x192, fixed seeds).
std::vector<ImageBuffer> make_corpus();

/// 128x128 crop used by the convergence benchmark.
ImageBuffer make_fit_crop();

/// Reference renderer: per-pixel sum over every gaussian, no culling, no
/// tiles. Kept independent of the production rasterizer.
ImageBuffer brute_force_render(const GaussianSet& set);

/// L = sum over pixels/channels of d_out * rendered, via the brute-force
/// path (finite-difference oracle helper).
double brute_force_loss(const GaussianSet& set, const ImageBuffer& d_out);

} // namespace gs2d::testing
