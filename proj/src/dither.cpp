// SPDX-License-Identifier: Apache-2.0
#include "gs2d/dither.hpp"

#include <algorithm>
#include <fstream>

namespace gs2d {

PatchGrid max_pool_patches(const ProbabilityMap& ppm, int k) {
    if (k < 1)
        throw std::invalid_argument("max_pool_patches: k must be >= 1");
    if (k > std::min(ppm.width, ppm.height))
        throw std::invalid_argument("max_pool_patches: k exceeds the map size");

    PatchGrid grid;
    grid.k = k;
    grid.pw = (ppm.width + k - 1) / k;
    grid.ph = (ppm.height + k - 1) / k;
    grid.values.assign(static_cast<std::size_t>(grid.pw) * grid.ph, 0.0);

    for (int pi = 0; pi < grid.ph; ++pi) {
        int y0 = pi * k;
        int y1 = std::min(y0 + k, ppm.height);
        for (int pj = 0; pj < grid.pw; ++pj) {
            int x0 = pj * k;
            int x1 = std::min(x0 + k, ppm.width);
            real m = 0.0;
            for (int i = y0; i < y1; ++i)
                for (int j = x0; j < x1; ++j)
                    m = std::max(m, ppm.at(i, j));
            grid.at(pi, pj) = m;
        }
    }
    return grid;
}

std::vector<unsigned char> floyd_steinberg(const PatchGrid& grid) {
    const int w = grid.pw;
    const int h = grid.ph;
    std::vector<real> buf = grid.values;
    std::vector<unsigned char> out(buf.size(), 0);

    auto spread = [&](int row, int col, real err) {
        if (col < 0 || col >= w || row < 0 || row >= h)
            return;
        buf[static_cast<std::size_t>(row) * w + col] += err;
    };

    for (int i = 0; i < h; ++i) {
        bool reverse = (i % 2) == 1; // serpentine scan
        int dir = reverse ? -1 : 1;
        int j = reverse ? w - 1 : 0;
        for (int step = 0; step < w; ++step, j += dir) {
            real old = buf[static_cast<std::size_t>(i) * w + j];
            unsigned char on = old >= 0.5 ? 1 : 0;
            out[static_cast<std::size_t>(i) * w + j] = on;
            real err = old - static_cast<real>(on);
            spread(i, j + dir, err * (7.0 / 16.0));
            spread(i + 1, j - dir, err * (3.0 / 16.0));
            spread(i + 1, j, err * (5.0 / 16.0));
            spread(i + 1, j + dir, err * (1.0 / 16.0));
        }
    }
    return out;
}

std::vector<Vec2> extract_points(const std::vector<unsigned char>& active, int pw, int ph, int k,
                                 int width, int height) {
    if (active.size() != static_cast<std::size_t>(pw) * ph)
        throw std::invalid_argument("extract_points: grid size mismatch");
    if (pw != (width + k - 1) / k || ph != (height + k - 1) / k)
        throw std::invalid_argument("extract_points: grid inconsistent with (W,H,k)");

    std::vector<Vec2> pts;
    for (int i = 0; i < ph; ++i)
        for (int j = 0; j < pw; ++j)
            if (active[static_cast<std::size_t>(i) * pw + j])
                pts.push_back({std::min((j + 0.5) * k, width - 0.5),
                               std::min((i + 0.5) * k, height - 0.5)});
    return pts;
}

void save_points_csv(const std::vector<Vec2>& points, const std::string& path) {
    std::ofstream out(path);
    if (!out)
        throw io_error("cannot open '" + path + "' for writing");
    out << "x,y\n";
    for (const auto& p : points)
        out << p.x << "," << p.y << "\n";
    if (!out)
        throw io_error("short write to '" + path + "'");
}

} // namespace gs2d
