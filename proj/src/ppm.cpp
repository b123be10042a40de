// SPDX-License-Identifier: Apache-2.0
#include "gs2d/ppm.hpp"

#include "gs2d/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>

namespace gs2d {

namespace {

constexpr std::size_t kBruteForceLimit = 256;

// Summed-area tables over the channel sums and squared sums; lets the
// quadtree evaluate block mean and MSE in O(1).
struct BlockStats {
    int w = 0, h = 0;
    std::vector<double> sum[3];
    std::vector<double> sum2; // sum over channels of value^2

    explicit BlockStats(const ImageBuffer& img) : w(img.width), h(img.height) {
        std::size_t n = static_cast<std::size_t>(w + 1) * (h + 1);
        for (auto& s : sum)
            s.assign(n, 0.0);
        sum2.assign(n, 0.0);
        for (int i = 0; i < h; ++i)
            for (int j = 0; j < w; ++j) {
                std::size_t idx = static_cast<std::size_t>(i + 1) * (w + 1) + (j + 1);
                std::size_t up = idx - (w + 1);
                double s2 = 0.0;
                for (int c = 0; c < 3; ++c) {
                    double v = img.at(i, j, c);
                    sum[c][idx] = sum[c][idx - 1] + sum[c][up] - sum[c][up - 1] + v;
                    s2 += v * v;
                }
                sum2[idx] = sum2[idx - 1] + sum2[up] - sum2[up - 1] + s2;
            }
    }

    double rect(const std::vector<double>& t, int x0, int y0, int x1, int y1) const {
        return t[static_cast<std::size_t>(y1) * (w + 1) + x1] -
               t[static_cast<std::size_t>(y0) * (w + 1) + x1] -
               t[static_cast<std::size_t>(y1) * (w + 1) + x0] +
               t[static_cast<std::size_t>(y0) * (w + 1) + x0];
    }

    Vec3 mean(int x0, int y0, int x1, int y1) const {
        double area = static_cast<double>(x1 - x0) * (y1 - y0);
        return {rect(sum[0], x0, y0, x1, y1) / area, rect(sum[1], x0, y0, x1, y1) / area,
                rect(sum[2], x0, y0, x1, y1) / area};
    }

    // Mean over pixels and channels of squared deviation from the block mean.
    double mse(int x0, int y0, int x1, int y1) const {
        double area = static_cast<double>(x1 - x0) * (y1 - y0);
        Vec3 m = mean(x0, y0, x1, y1);
        double e2 = rect(sum2, x0, y0, x1, y1);
        return std::max(0.0, e2 / (area * 3.0) - (m.r * m.r + m.g * m.g + m.b * m.b) / 3.0);
    }
};

void split_block(const BlockStats& st, int x0, int y0, int size, real threshold, int min_size,
                 std::vector<QuadtreeLeaf>& out) {
    int x1 = std::min(x0 + size, st.w);
    int y1 = std::min(y0 + size, st.h);
    if (x1 <= x0 || y1 <= y0)
        return;
    if (size > min_size && st.mse(x0, y0, x1, y1) > threshold) {
        int half = size / 2;
        split_block(st, x0, y0, half, threshold, min_size, out);
        split_block(st, x0 + half, y0, half, threshold, min_size, out);
        split_block(st, x0, y0 + half, half, threshold, min_size, out);
        split_block(st, x0 + half, y0 + half, half, threshold, min_size, out);
        return;
    }
    out.push_back({x0, y0, size, st.mean(x0, y0, x1, y1)});
}

std::uint32_t read_u32le(std::ifstream& in, const std::string& path, std::size_t offset) {
    unsigned char buf[4];
    if (!in.read(reinterpret_cast<char*>(buf), 4))
        throw io_error("'" + path + "': truncated at byte " + std::to_string(offset));
    return static_cast<std::uint32_t>(buf[0]) | (static_cast<std::uint32_t>(buf[1]) << 8) |
           (static_cast<std::uint32_t>(buf[2]) << 16) | (static_cast<std::uint32_t>(buf[3]) << 24);
}

void write_u32le(std::ofstream& out, std::uint32_t v) {
    char buf[4] = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
                   static_cast<char>((v >> 16) & 0xff), static_cast<char>((v >> 24) & 0xff)};
    out.write(buf, 4);
}

} // namespace

std::vector<QuadtreeLeaf> quadtree_partition(const ImageBuffer& img, real mse_threshold,
                                             int min_size) {
    if (img.width < 1 || img.height < 1)
        throw std::invalid_argument("quadtree_partition: empty image");
    int root = 1;
    while (root < std::max(img.width, img.height))
        root *= 2;
    BlockStats st(img);
    std::vector<QuadtreeLeaf> leaves;
    split_block(st, 0, 0, root, mse_threshold, min_size, leaves);
    return leaves;
}

PointIndex::PointIndex(std::vector<Vec2> points) : points_(std::move(points)) {
    if (points_.size() < kBruteForceLimit)
        return;

    real min_x = points_[0].x, max_x = points_[0].x;
    real min_y = points_[0].y, max_y = points_[0].y;
    for (const auto& p : points_) {
        min_x = std::min(min_x, p.x);
        max_x = std::max(max_x, p.x);
        min_y = std::min(min_y, p.y);
        max_y = std::max(max_y, p.y);
    }
    real area = std::max((max_x - min_x) * (max_y - min_y), real(1e-12));
    // Bucket edge near the expected nearest-neighbour spacing.
    cell_ = std::max(std::sqrt(area / static_cast<real>(points_.size())), real(1e-9));
    min_x_ = min_x;
    min_y_ = min_y;
    nx_ = static_cast<int>((max_x - min_x) / cell_) + 1;
    ny_ = static_cast<int>((max_y - min_y) / cell_) + 1;
    cells_.resize(static_cast<std::size_t>(nx_) * ny_);
    for (std::size_t i = 0; i < points_.size(); ++i) {
        int cx = static_cast<int>((points_[i].x - min_x_) / cell_);
        int cy = static_cast<int>((points_[i].y - min_y_) / cell_);
        cells_[static_cast<std::size_t>(cy) * nx_ + cx].push_back(static_cast<int>(i));
    }
    use_grid_ = true;
}

real PointIndex::knn_radius(Vec2 query, int k) const {
    if (k < 1 || static_cast<std::size_t>(k) > points_.size())
        throw std::invalid_argument("knn_radius: need 1 <= k <= point count");

    if (!use_grid_) {
        std::vector<real> d2(points_.size());
        for (std::size_t i = 0; i < points_.size(); ++i)
            d2[i] = (points_[i] - query).norm2();
        std::nth_element(d2.begin(), d2.begin() + (k - 1), d2.end());
        return std::sqrt(d2[k - 1]);
    }

    int qx = std::clamp(static_cast<int>((query.x - min_x_) / cell_), 0, nx_ - 1);
    int qy = std::clamp(static_cast<int>((query.y - min_y_) / cell_), 0, ny_ - 1);

    std::vector<real> best; // squared distances, max-heap of size k
    best.reserve(k + 1);
    auto push = [&](real d2) {
        if (static_cast<int>(best.size()) < k) {
            best.push_back(d2);
            std::push_heap(best.begin(), best.end());
        } else if (d2 < best.front()) {
            std::pop_heap(best.begin(), best.end());
            best.back() = d2;
            std::push_heap(best.begin(), best.end());
        }
    };

    int max_ring = std::max(nx_, ny_);
    for (int ring = 0; ring <= max_ring + 1; ++ring) {
        // Cells at Chebyshev distance >= ring are separated from the query
        // by at least (ring - 1) full cells.
        if (ring > 0 && static_cast<int>(best.size()) == k) {
            real bound = static_cast<real>(ring - 1) * cell_;
            if (best.front() <= bound * bound)
                break;
        }
        int x0 = qx - ring, x1 = qx + ring;
        int y0 = qy - ring, y1 = qy + ring;
        for (int cy = y0; cy <= y1; ++cy) {
            if (cy < 0 || cy >= ny_)
                continue;
            for (int cx = x0; cx <= x1; ++cx) {
                if (cx < 0 || cx >= nx_)
                    continue;
                if (ring > 0 && cx != x0 && cx != x1 && cy != y0 && cy != y1)
                    continue; // interior already scanned
                for (int idx : cells_[static_cast<std::size_t>(cy) * nx_ + cx])
                    push((points_[idx] - query).norm2());
            }
        }
    }
    return std::sqrt(best.front());
}

real knn_radius(const std::vector<Vec2>& points, Vec2 query, int k) {
    return PointIndex(points).knn_radius(query, k);
}

real local_density(const std::vector<Vec2>& points, Vec2 query, int k) {
    real r = knn_radius(points, query, k);
    if (r <= 0.0)
        throw std::domain_error("local_density: k-th neighbour coincides with the query");
    return static_cast<real>(k) / (M_PI * r * r);
}

ProbabilityMap three_sigma_normalize(const std::vector<real>& grid, int width, int height) {
    if (grid.empty() || grid.size() != static_cast<std::size_t>(width) * height)
        throw std::invalid_argument("three_sigma_normalize: bad grid size");

    double mean = 0.0;
    for (real v : grid) {
        if (!std::isfinite(v))
            throw std::invalid_argument("three_sigma_normalize: non-finite value");
        mean += v;
    }
    mean /= static_cast<double>(grid.size());
    double var = 0.0;
    for (real v : grid)
        var += (v - mean) * (v - mean);
    var /= static_cast<double>(grid.size());
    double sd = std::sqrt(var);

    auto [mn_it, mx_it] = std::minmax_element(grid.begin(), grid.end());
    double lo = std::max(mean - 3.0 * sd, static_cast<double>(*mn_it));
    double hi = std::min(mean + 3.0 * sd, static_cast<double>(*mx_it));

    ProbabilityMap map(width, height);
    if (hi - lo <= 0.0)
        return map; // constant input -> all zeros
    for (std::size_t i = 0; i < grid.size(); ++i)
        map.values[i] = std::clamp((grid[i] - lo) / (hi - lo), 0.0, 1.0);
    return map;
}

ProbabilityMap pseudo_ppm(const std::vector<Vec2>& gaussian_positions, int width, int height,
                          int k) {
    if (gaussian_positions.size() < static_cast<std::size_t>(k))
        throw std::invalid_argument("pseudo_ppm: fewer positions than k");

    PointIndex index(gaussian_positions);
    std::vector<real> raw(static_cast<std::size_t>(width) * height);
    parallel_for(static_cast<std::size_t>(height), [&](std::size_t row) {
        for (int col = 0; col < width; ++col) {
            Vec2 q{col + 0.5, static_cast<real>(row) + 0.5};
            real r = std::max(index.knn_radius(q, k), real(1e-12));
            raw[row * width + col] = static_cast<real>(k) / std::sqrt(r);
        }
    });
    return three_sigma_normalize(raw, width, height);
}

ProbabilityMap gradient_ppm(const ImageBuffer& img) {
    return three_sigma_normalize(luma_gradient_magnitude(img), img.width, img.height);
}

void save_ppmf(const ProbabilityMap& map, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw io_error("cannot open '" + path + "' for writing");
    out.write("PPMF", 4);
    write_u32le(out, static_cast<std::uint32_t>(map.width));
    write_u32le(out, static_cast<std::uint32_t>(map.height));
    write_u32le(out, 0); // reserved, pads the header to 16 bytes
    for (real v : map.values) {
        float f = static_cast<float>(v);
        char buf[4];
        std::memcpy(buf, &f, 4);
        out.write(buf, 4);
    }
    if (!out)
        throw io_error("short write to '" + path + "'");
}

ProbabilityMap load_ppmf(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw io_error("cannot open '" + path + "' for reading");
    char magic[4];
    if (!in.read(magic, 4))
        throw io_error("'" + path + "': truncated at byte 0");
    if (std::memcmp(magic, "PPMF", 4) != 0)
        throw io_error("'" + path + "': bad magic");
    std::uint32_t w = read_u32le(in, path, 4);
    std::uint32_t h = read_u32le(in, path, 8);
    (void)read_u32le(in, path, 12);
    if (w == 0 || h == 0)
        throw io_error("'" + path + "': zero dimensions");

    ProbabilityMap map(static_cast<int>(w), static_cast<int>(h));
    for (std::size_t i = 0; i < map.values.size(); ++i) {
        float f;
        if (!in.read(reinterpret_cast<char*>(&f), 4))
            throw io_error("'" + path + "': truncated at byte " + std::to_string(16 + i * 4));
        map.values[i] = f;
    }
    return map;
}

} // namespace gs2d
