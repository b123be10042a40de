// SPDX-License-Identifier: Apache-2.0
#include "gs2d/rasterizer.hpp"

#include "gs2d/parallel.hpp"

#include <algorithm>
#include <cmath>

namespace gs2d {

namespace {

constexpr int kTileSize = 16;
constexpr real kTwoPi = 6.283185307179586476925286766559;
constexpr real kMaxConditionNumber = 1e12;

struct Prepared {
    real mux = 0.0, muy = 0.0; // pixel coords
    real cosa = 0.0, sina = 0.0;
    real i1 = 0.0, i2 = 0.0; // 1/s1^2, 1/s2^2
    PixelRect box;
};

void validate_set(const GaussianSet& set) {
    if (set.gaussians.empty())
        throw std::invalid_argument("render: empty gaussian set");
    if (set.width < 1 || set.height < 1)
        throw std::invalid_argument("render: raster size must be >= 1");
    for (const auto& g : set.gaussians) {
        if (!std::isfinite(g.mu.x) || !std::isfinite(g.mu.y))
            throw std::invalid_argument("render: non-finite gaussian position");
        if (!(g.s1 > 0.0) || !(g.s2 > 0.0))
            throw std::domain_error("render: non-positive gaussian scale");
        real hi = std::max(g.s1, g.s2);
        real lo = std::min(g.s1, g.s2);
        if ((hi / lo) * (hi / lo) > kMaxConditionNumber)
            throw std::domain_error("render: near-singular covariance");
    }
}

Prepared prepare(const Gaussian2D& g, real cutoff, int width, int height) {
    Prepared p;
    PixelPos px = ndc_to_pixel({g.mu.x, g.mu.y}, width, height);
    p.mux = px.x;
    p.muy = px.y;
    real angle = g.theta01 * kTwoPi;
    p.cosa = std::cos(angle);
    p.sina = std::sin(angle);
    p.i1 = 1.0 / (g.s1 * g.s1);
    p.i2 = 1.0 / (g.s2 * g.s2);
    p.box = footprint_bbox(g, cutoff, width, height);
    return p;
}

struct TileMap {
    int tiles_x = 0;
    int tiles_y = 0;
    std::vector<std::vector<int>> bins; // gaussian indices, ascending
};

TileMap build_bins(const std::vector<Prepared>& prep, int width, int height) {
    TileMap tm;
    tm.tiles_x = (width + kTileSize - 1) / kTileSize;
    tm.tiles_y = (height + kTileSize - 1) / kTileSize;
    tm.bins.resize(static_cast<std::size_t>(tm.tiles_x) * tm.tiles_y);
    for (std::size_t gi = 0; gi < prep.size(); ++gi) {
        const PixelRect& b = prep[gi].box;
        if (b.empty())
            continue;
        int tx0 = b.x0 / kTileSize;
        int tx1 = (b.x1 - 1) / kTileSize;
        int ty0 = b.y0 / kTileSize;
        int ty1 = (b.y1 - 1) / kTileSize;
        for (int ty = ty0; ty <= ty1; ++ty)
            for (int tx = tx0; tx <= tx1; ++tx)
                tm.bins[static_cast<std::size_t>(ty) * tm.tiles_x + tx].push_back(
                    static_cast<int>(gi));
    }
    return tm;
}

struct GradRec {
    double mu_x = 0.0, mu_y = 0.0;
    double s1 = 0.0, s2 = 0.0;
    double theta = 0.0;
    double r = 0.0, g = 0.0, b = 0.0;
};

} // namespace

PixelRect footprint_bbox(const Gaussian2D& g, real cutoff_sigma, int width, int height) {
    // The cutoff ellipse d^T Sigma^-1 d <= c^2 has axis-aligned extents
    // c*sqrt(Sigma_xx) and c*sqrt(Sigma_yy).
    real angle = g.theta01 * kTwoPi;
    real c = std::cos(angle);
    real s = std::sin(angle);
    real a = g.s1 * g.s1;
    real b = g.s2 * g.s2;
    real ex = cutoff_sigma * std::sqrt(a * c * c + b * s * s);
    real ey = cutoff_sigma * std::sqrt(a * s * s + b * c * c);

    PixelPos mu = ndc_to_pixel({g.mu.x, g.mu.y}, width, height);
    // Pixel (i,j) center is (j+0.5, i+0.5); keep centers landing exactly on
    // the cutoff boundary.
    PixelRect r;
    r.x0 = std::max(0, static_cast<int>(std::ceil(mu.x - ex - 0.5)));
    r.x1 = std::min(width, static_cast<int>(std::floor(mu.x + ex - 0.5)) + 1);
    r.y0 = std::max(0, static_cast<int>(std::ceil(mu.y - ey - 0.5)));
    r.y1 = std::min(height, static_cast<int>(std::floor(mu.y + ey - 0.5)) + 1);
    return r;
}

ImageBuffer render(const GaussianSet& set, const RenderOptions& opts) {
    validate_set(set);
    const int w = set.width;
    const int h = set.height;
    const std::size_t n = set.gaussians.size();

    std::vector<Prepared> prep(n);
    for (std::size_t i = 0; i < n; ++i)
        prep[i] = prepare(set.gaussians[i], opts.cutoff_sigma, w, h);
    TileMap tm = build_bins(prep, w, h);

    ImageBuffer out(w, h, 0.0);
    parallel_for(tm.bins.size(), [&](std::size_t tile) {
        const auto& bin = tm.bins[tile];
        if (bin.empty())
            return;
        int ty = static_cast<int>(tile) / tm.tiles_x;
        int tx = static_cast<int>(tile) % tm.tiles_x;
        int px0 = tx * kTileSize, px1 = std::min(w, px0 + kTileSize);
        int py0 = ty * kTileSize, py1 = std::min(h, py0 + kTileSize);

        for (int gi : bin) {
            const Prepared& p = prep[gi];
            const Vec3& col = set.gaussians[gi].color;
            int x0 = std::max(px0, p.box.x0), x1 = std::min(px1, p.box.x1);
            int y0 = std::max(py0, p.box.y0), y1 = std::min(py1, p.box.y1);
            for (int i = y0; i < y1; ++i) {
                real dy = (i + 0.5) - p.muy;
                std::size_t row = (static_cast<std::size_t>(i) * w) * 3;
                for (int j = x0; j < x1; ++j) {
                    real dx = (j + 0.5) - p.mux;
                    real e1 = p.cosa * dx + p.sina * dy;
                    real e2 = -p.sina * dx + p.cosa * dy;
                    real sigma = 0.5 * (e1 * e1 * p.i1 + e2 * e2 * p.i2);
                    real wgt = std::exp(-sigma);
                    std::size_t idx = row + static_cast<std::size_t>(j) * 3;
                    out.data[idx] += col.r * wgt;
                    out.data[idx + 1] += col.g * wgt;
                    out.data[idx + 2] += col.b * wgt;
                }
            }
        }
    });
    return out;
}

RenderGrads render_backward(const GaussianSet& set, const ImageBuffer& d_out,
                            const RenderOptions& opts) {
    validate_set(set);
    if (d_out.width != set.width || d_out.height != set.height)
        throw std::invalid_argument("render_backward: gradient grid size mismatch");

    const int w = set.width;
    const int h = set.height;
    const std::size_t n = set.gaussians.size();

    std::vector<Prepared> prep(n);
    for (std::size_t i = 0; i < n; ++i)
        prep[i] = prepare(set.gaussians[i], opts.cutoff_sigma, w, h);
    TileMap tm = build_bins(prep, w, h);

    // Per-tile partial gradients, one slot per bin entry. Each tile is
    // written by exactly one worker; the final reduction runs serially in
    // tile order so the result does not depend on the thread count.
    std::vector<std::vector<GradRec>> partials(tm.bins.size());
    parallel_for(tm.bins.size(), [&](std::size_t tile) {
        const auto& bin = tm.bins[tile];
        if (bin.empty())
            return;
        partials[tile].resize(bin.size());
        int ty = static_cast<int>(tile) / tm.tiles_x;
        int tx = static_cast<int>(tile) % tm.tiles_x;
        int px0 = tx * kTileSize, px1 = std::min(w, px0 + kTileSize);
        int py0 = ty * kTileSize, py1 = std::min(h, py0 + kTileSize);

        for (std::size_t bi = 0; bi < bin.size(); ++bi) {
            int gi = bin[bi];
            const Prepared& p = prep[gi];
            const Gaussian2D& g = set.gaussians[gi];
            GradRec& acc = partials[tile][bi];
            int x0 = std::max(px0, p.box.x0), x1 = std::min(px1, p.box.x1);
            int y0 = std::max(py0, p.box.y0), y1 = std::min(py1, p.box.y1);
            for (int i = y0; i < y1; ++i) {
                real dy = (i + 0.5) - p.muy;
                for (int j = x0; j < x1; ++j) {
                    real dx = (j + 0.5) - p.mux;
                    real e1 = p.cosa * dx + p.sina * dy;
                    real e2 = -p.sina * dx + p.cosa * dy;
                    real sigma = 0.5 * (e1 * e1 * p.i1 + e2 * e2 * p.i2);
                    real wgt = std::exp(-sigma);

                    Vec3 go = d_out.pixel(i, j);
                    acc.r += go.r * wgt;
                    acc.g += go.g * wgt;
                    acc.b += go.b * wgt;

                    real gsigma = -(go.r * g.color.r + go.g * g.color.g + go.b * g.color.b) * wgt;
                    acc.s1 += gsigma * (-(e1 * e1) * p.i1 / g.s1);
                    acc.s2 += gsigma * (-(e2 * e2) * p.i2 / g.s2);
                    acc.theta += gsigma * e1 * e2 * (p.i1 - p.i2) * kTwoPi;

                    // dL/d(mu_px) = -gsigma * R D e
                    real v1 = p.i1 * e1;
                    real v2 = p.i2 * e2;
                    acc.mu_x += -gsigma * (p.cosa * v1 - p.sina * v2);
                    acc.mu_y += -gsigma * (p.sina * v1 + p.cosa * v2);
                }
            }
        }
    });

    RenderGrads grads;
    grads.resize(n);
    std::vector<GradRec> total(n);
    for (std::size_t tile = 0; tile < tm.bins.size(); ++tile) {
        const auto& bin = tm.bins[tile];
        for (std::size_t bi = 0; bi < bin.size(); ++bi) {
            const GradRec& r = partials[tile][bi];
            GradRec& t = total[bin[bi]];
            t.mu_x += r.mu_x;
            t.mu_y += r.mu_y;
            t.s1 += r.s1;
            t.s2 += r.s2;
            t.theta += r.theta;
            t.r += r.r;
            t.g += r.g;
            t.b += r.b;
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        // Chain pixel-space position gradients back to NDC.
        grads.d_mu[i] = {total[i].mu_x * (0.5 * w), total[i].mu_y * (0.5 * h)};
        grads.d_s[i] = {total[i].s1, total[i].s2};
        grads.d_theta[i] = total[i].theta;
        grads.d_color[i] = {total[i].r, total[i].g, total[i].b};
    }
    return grads;
}

} // namespace gs2d
