// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "gs2d/ppm.hpp"
#include "gs2d/types.hpp"

#include <string>
#include <vector>

namespace gs2d {

/// Patch-level probability grid: pw x ph patches of k x k pixels (edge
/// patches cover the remainder), ph rows by pw columns, row-major.
struct PatchGrid {
    int pw = 0;
    int ph = 0;
    int k = 1;
    std::vector<real> values;

    real at(int row, int col) const { return values[static_cast<std::size_t>(row) * pw + col]; }
    real& at(int row, int col) { return values[static_cast<std::size_t>(row) * pw + col]; }
};

/// Each patch takes the maximum probability over its pixels.
PatchGrid max_pool_patches(const ProbabilityMap& ppm, int k);

/// Serial serpentine Floyd-Steinberg error diffusion: threshold 0.5,
/// classic 7/16-3/16-5/16-1/16 weights (mirrored on reverse rows), error
/// leaving the grid discarded. Returns ph x pw activation flags.
std::vector<unsigned char> floyd_steinberg(const PatchGrid& grid);

/// Centers of activated patches in original pixel coordinates, clamped so
/// edge-patch centers stay inside [0,W) x [0,H).
std::vector<Vec2> extract_points(const std::vector<unsigned char>& active, int pw, int ph, int k,
                                 int width, int height);

/// CSV export of sample points, one "x,y" line each.
void save_points_csv(const std::vector<Vec2>& points, const std::string& path);

} // namespace gs2d
