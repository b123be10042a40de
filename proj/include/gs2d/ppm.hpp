// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "gs2d/image.hpp"
#include "gs2d/types.hpp"

#include <string>
#include <vector>

namespace gs2d {

/// Per-pixel gaussian-generation probability in [0,1], row-major.
struct ProbabilityMap {
    int width = 0;
    int height = 0;
    std::vector<real> values;

    ProbabilityMap() = default;
    ProbabilityMap(int w, int h, real fill = 0.0)
        : width(w), height(h), values(static_cast<std::size_t>(w) * h, fill) {}

    real at(int row, int col) const { return values[static_cast<std::size_t>(row) * width + col]; }
    real& at(int row, int col) { return values[static_cast<std::size_t>(row) * width + col]; }
};

/// Square block from the power-of-two quadtree descent; blocks sticking out
/// of the image are clipped to it.
struct QuadtreeLeaf {
    int x0 = 0;
    int y0 = 0;
    int size = 0; // nominal square edge, power of two
    Vec3 mean_color;

    int clipped_w(int image_width) const { return std::min(size, image_width - x0); }
    int clipped_h(int image_height) const { return std::min(size, image_height - y0); }
};

/// Recursive 4-way split while the block's color MSE exceeds the threshold
/// and the block is larger than min_size. Leaves tile the image exactly.
std::vector<QuadtreeLeaf> quadtree_partition(const ImageBuffer& img, real mse_threshold = 0.02,
                                             int min_size = 4);

/// Bucket-grid point index; exact k-NN queries, brute force below 256 points.
class PointIndex {
  public:
    explicit PointIndex(std::vector<Vec2> points);

    /// Distance to the k-th nearest point (the query itself is not a member;
    /// coincident points count at distance 0).
    real knn_radius(Vec2 query, int k) const;

    std::size_t size() const { return points_.size(); }

  private:
    std::vector<Vec2> points_;
    bool use_grid_ = false;
    real cell_ = 1.0;
    real min_x_ = 0.0, min_y_ = 0.0;
    int nx_ = 0, ny_ = 0;
    std::vector<std::vector<int>> cells_;
};

real knn_radius(const std::vector<Vec2>& points, Vec2 query, int k);

/// K / (pi * r_k^2) in gaussians per squared pixel. Errors when the k-th
/// neighbour coincides with the query.
real local_density(const std::vector<Vec2>& points, Vec2 query, int k = 10);

/// Affine rescale of a grid by the 3-sigma clipped range, clamped to [0,1].
/// A constant grid maps to all zeros.
ProbabilityMap three_sigma_normalize(const std::vector<real>& grid, int width, int height);

/// Pseudo probability map from an existing decomposition's positions (pixel
/// coordinates): per pixel, K / r_k^(1/2) followed by three-sigma clipped
/// normalization.
ProbabilityMap pseudo_ppm(const std::vector<Vec2>& gaussian_positions, int width, int height,
                          int k = 10);

/// Edge-emphasizing baseline: three-sigma normalized Sobel magnitude.
ProbabilityMap gradient_ppm(const ImageBuffer& img);

// Raw f32 container: 16-byte header (magic "PPMF", u32 width, u32 height,
// u32 reserved=0) followed by width*height little-endian f32 values.
void save_ppmf(const ProbabilityMap& map, const std::string& path);
ProbabilityMap load_ppmf(const std::string& path);

} // namespace gs2d
