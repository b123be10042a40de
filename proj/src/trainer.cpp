// SPDX-License-Identifier: Apache-2.0
#include "gs2d/trainer.hpp"

#include "gs2d/dither.hpp"
#include "gs2d/ppm.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>

namespace gs2d {

namespace {

constexpr real kMinScale = 0.01; // px floor applied after every step
constexpr real kPi = 3.14159265358979323846;

using Clock = std::chrono::steady_clock;

real seconds_since(Clock::time_point t0) {
    return std::chrono::duration<real>(Clock::now() - t0).count();
}

// Flat layout: 8 params per gaussian, [mu_x, mu_y, s1, s2, theta01, r, g, b].
std::vector<real> flatten(const GaussianSet& set) {
    std::vector<real> p(set.size() * 8);
    for (std::size_t i = 0; i < set.size(); ++i) {
        const Gaussian2D& g = set.gaussians[i];
        real* q = p.data() + i * 8;
        q[0] = g.mu.x;
        q[1] = g.mu.y;
        q[2] = g.s1;
        q[3] = g.s2;
        q[4] = g.theta01;
        q[5] = g.color.r;
        q[6] = g.color.g;
        q[7] = g.color.b;
    }
    return p;
}

void unflatten(const std::vector<real>& p, GaussianSet& set) {
    for (std::size_t i = 0; i < set.size(); ++i) {
        Gaussian2D& g = set.gaussians[i];
        const real* q = p.data() + i * 8;
        g.mu = {q[0], q[1]};
        g.s1 = std::max(q[2], kMinScale);
        g.s2 = std::max(q[3], kMinScale);
        g.theta01 = q[4];
        g.color = {q[5], q[6], q[7]};
    }
}

std::vector<real> flatten_grads(const RenderGrads& g) {
    std::vector<real> out(g.d_mu.size() * 8);
    for (std::size_t i = 0; i < g.d_mu.size(); ++i) {
        real* q = out.data() + i * 8;
        q[0] = g.d_mu[i].x;
        q[1] = g.d_mu[i].y;
        q[2] = g.d_s[i].x;
        q[3] = g.d_s[i].y;
        q[4] = g.d_theta[i];
        q[5] = g.d_color[i].r;
        q[6] = g.d_color[i].g;
        q[7] = g.d_color[i].b;
    }
    return out;
}

void check_finite(const std::vector<real>& v, const char* what) {
    for (real x : v)
        if (!std::isfinite(x))
            throw std::domain_error(std::string(what) + ": non-finite value");
}

NdcPos clamp_ndc(NdcPos p) {
    return {std::clamp(p.x, -1.0, 1.0), std::clamp(p.y, -1.0, 1.0)};
}

Gaussian2D gaussian_from_ellipse(const FittedEllipse& e, const ImageBuffer& img,
                                 real color_weight) {
    Gaussian2D g;
    g.mu = clamp_ndc(pixel_to_ndc({e.center.x, e.center.y}, img.width, img.height));
    g.s1 = std::max(e.semi_x, kMinScale);
    g.s2 = std::max(e.semi_y, kMinScale);
    // Ellipse angles live on a pi period, the gaussian convention on 2*pi.
    g.theta01 = e.theta01 * 0.5;
    g.color = sample_bilinear(img, g.mu) * color_weight;
    return g;
}

FittedEllipse fallback_ellipse(const std::array<Vec2, 3>& tri) {
    // Longest-edge aligned stand-in for a failed conic fit.
    int ei = 0;
    real best = -1.0;
    for (int e = 0; e < 3; ++e) {
        real len = (tri[(e + 1) % 3] - tri[e]).norm();
        if (len > best) {
            best = len;
            ei = e;
        }
    }
    Vec2 a = tri[ei], b = tri[(ei + 1) % 3];
    real area = triangle_area(tri);

    FittedEllipse fe;
    fe.center = {(tri[0].x + tri[1].x + tri[2].x) / 3.0, (tri[0].y + tri[1].y + tri[2].y) / 3.0};
    fe.semi_x = 0.5 * (best / 2.0);
    fe.semi_y = 0.5 * (area * 4.0 / (best * kPi));
    real angle = std::atan2(b.y - a.y, b.x - a.x);
    angle = std::fmod(angle, kPi);
    if (angle < 0.0)
        angle += kPi;
    fe.theta01 = angle / kPi;
    return fe;
}

GaussianSet initialize(const ImageBuffer& img, const FitConfig& cfg) {
    switch (cfg.init) {
    case InitKind::Random:
        return random_init(cfg.num_gaussians, img.width, img.height, cfg.seed);
    case InitKind::Structured: {
        StructuredInitOptions opts;
        opts.kernel = cfg.kernel;
        opts.ppm_source = cfg.ppm_source;
        opts.pseudo_positions = cfg.pseudo_positions;
        opts.gain_calibration = cfg.init_gain;
        opts.cutoff_sigma = cfg.cutoff_sigma;
        return structured_init(img, opts);
    }
    case InitKind::Quadtree:
        return quadtree_init(img);
    }
    throw std::invalid_argument("fit: unknown init kind");
}

} // namespace

void adam_step(std::vector<real>& params, const std::vector<real>& grads, AdamState& state,
               real lr, real beta1, real beta2, real eps) {
    if (params.size() != grads.size())
        throw std::invalid_argument("adam_step: parameter/gradient size mismatch");
    if (state.m.empty()) {
        state.m.assign(params.size(), 0.0);
        state.v.assign(params.size(), 0.0);
        state.step = 0;
    }
    if (state.m.size() != params.size())
        throw std::invalid_argument("adam_step: state size mismatch");
    check_finite(grads, "adam_step");

    state.step += 1;
    real bc1 = 1.0 - std::pow(beta1, static_cast<real>(state.step));
    real bc2 = 1.0 - std::pow(beta2, static_cast<real>(state.step));
    for (std::size_t i = 0; i < params.size(); ++i) {
        state.m[i] = beta1 * state.m[i] + (1.0 - beta1) * grads[i];
        state.v[i] = beta2 * state.v[i] + (1.0 - beta2) * grads[i] * grads[i];
        real mhat = state.m[i] / bc1;
        real vhat = state.v[i] / bc2;
        params[i] -= lr * mhat / (std::sqrt(vhat) + eps);
    }
}

GaussianSet structured_init(const ImageBuffer& img, const StructuredInitOptions& opts) {
    ProbabilityMap ppm;
    if (opts.ppm_source == PpmSource::Gradient) {
        ppm = gradient_ppm(img);
    } else {
        if (opts.pseudo_positions.empty())
            throw std::invalid_argument("structured_init: pseudo source needs positions");
        ppm = pseudo_ppm(opts.pseudo_positions, img.width, img.height);
    }

    PatchGrid grid = max_pool_patches(ppm, opts.kernel);
    std::vector<unsigned char> active = floyd_steinberg(grid);
    std::vector<Vec2> pts =
        extract_points(active, grid.pw, grid.ph, grid.k, img.width, img.height);

    // A near-zero map (constant image) activates almost nothing; the mesh
    // is then boundary-dominated with a fallback spacing.
    real delta = pts.size() >= 2 ? mean_nn_distance(pts)
                                 : std::min(img.width, img.height) / 12.0;
    AugmentedPoints aug = add_boundary_points(pts, img.width, img.height, 3.0 * delta);
    if (aug.points.size() < 3)
        throw std::domain_error("structured_init: not enough points to triangulate");
    TriangleMesh mesh = delaunay(aug.points);

    GaussianSet set;
    set.width = img.width;
    set.height = img.height;
    set.gaussians.reserve(mesh.triangles.size());
    for (const auto& t : mesh.triangles) {
        std::array<Vec2, 3> tri = {mesh.points[t[0]], mesh.points[t[1]], mesh.points[t[2]]};
        FittedEllipse e;
        try {
            e = fit_ellipse(six_point_set(tri));
        } catch (const std::domain_error&) {
            e = fallback_ellipse(tri);
        }
        set.gaussians.push_back(gaussian_from_ellipse(e, img, opts.color_weight));
    }

    if (opts.gain_calibration) {
        // Accumulated tails leave the raw init systematically dim; a scalar
        // least-squares gain on the rendered image fixes the overall level
        // without touching the geometry.
        ImageBuffer first = render(set, {opts.cutoff_sigma});
        real num = 0.0, den = 0.0;
        for (std::size_t i = 0; i < first.data.size(); ++i) {
            num += first.data[i] * img.data[i];
            den += first.data[i] * first.data[i];
        }
        if (den > 1e-12 && num > 0.0) {
            real gain = num / den;
            for (auto& g : set.gaussians)
                g.color = g.color * gain;
        }
    }
    return set;
}

GaussianSet quadtree_init(const ImageBuffer& img, real mse_threshold, int min_size) {
    std::vector<QuadtreeLeaf> leaves = quadtree_partition(img, mse_threshold, min_size);
    GaussianSet set;
    set.width = img.width;
    set.height = img.height;
    set.gaussians.reserve(leaves.size());
    for (const auto& leaf : leaves) {
        real cw = leaf.clipped_w(img.width);
        real ch = leaf.clipped_h(img.height);
        Gaussian2D g;
        g.mu = clamp_ndc(
            pixel_to_ndc({leaf.x0 + cw * 0.5, leaf.y0 + ch * 0.5}, img.width, img.height));
        g.s1 = std::max(cw / 4.0, 0.5);
        g.s2 = std::max(ch / 4.0, 0.5);
        g.theta01 = 0.0;
        g.color = leaf.mean_color * 0.5;
        set.gaussians.push_back(g);
    }
    return set;
}

std::vector<Vec2> gaussian_pixel_positions(const GaussianSet& set) {
    std::vector<Vec2> pts;
    pts.reserve(set.size());
    for (const auto& g : set.gaussians) {
        PixelPos p = ndc_to_pixel({g.mu.x, g.mu.y}, set.width, set.height);
        pts.push_back({p.x, p.y});
    }
    return pts;
}

FitResult fit(const ImageBuffer& img, const FitConfig& config) {
    if (config.iterations < 0 || !(config.lr > 0.0))
        throw std::invalid_argument("fit: bad config");
    auto t0 = Clock::now();

    FitResult result;
    result.set = initialize(img, config);
    GaussianSet& set = result.set;
    RenderOptions ropts{config.cutoff_sigma};

    std::vector<real> params = flatten(set);
    AdamState state;

    auto log_point = [&](int iter, const ImageBuffer& rendered, real loss) {
        check_finite(params, "fit");
        LogEntry e;
        e.iteration = iter;
        e.elapsed_s = seconds_since(t0);
        e.psnr = psnr(rendered, img);
        e.ms_ssim = ms_ssim(rendered, img);
        e.loss = loss;
        e.n_gaussians = set.size();
        result.log.push_back(e);
    };

    auto checkpoint = [&](int iter) {
        if (config.checkpoint_path.empty())
            return;
        std::string path = config.checkpoint_path;
        auto pos = path.find("@ITER@");
        if (pos != std::string::npos)
            path.replace(pos, 6, std::to_string(iter));
        save_g2di(set, path);
    };

    std::vector<real> d_loss;
    int iter = 0;
    for (; iter < config.iterations; ++iter) {
        ImageBuffer rendered = render(set, ropts);
        real l2 = mse_l2(rendered, img, &d_loss);
        real loss = l2;
        if (config.loss == LossKind::Rec) {
            loss = config.lambda * l2 + (1.0 - config.lambda) * d_ssim(rendered, img);
            // Only the L2 term is differentiated.
            for (auto& g : d_loss)
                g *= config.lambda;
        }

        bool is_log = config.log_every > 0 ? (iter % config.log_every == 0) : (iter == 0);
        if (is_log)
            log_point(iter, rendered, loss);
        if (config.checkpoint_every > 0 && iter > 0 && iter % config.checkpoint_every == 0)
            checkpoint(iter);
        if (config.time_budget > 0.0 && seconds_since(t0) > config.time_budget) {
            result.stopped_by_budget = true;
            checkpoint(iter);
            break;
        }

        ImageBuffer d_out(img.width, img.height);
        d_out.data = d_loss;
        RenderGrads grads = render_backward(set, d_out, ropts);

        real lr = config.lr;
        if (config.cosine_lr && config.iterations > 1) {
            real t = static_cast<real>(iter) / (config.iterations - 1);
            lr = config.lr_min + 0.5 * (config.lr - config.lr_min) * (1.0 + std::cos(kPi * t));
        }
        adam_step(params, flatten_grads(grads), state, lr, config.beta1, config.beta2,
                  config.adam_eps);
        unflatten(params, set);
        params = flatten(set); // scale clamp feeds back into the flat vector
    }

    ImageBuffer final_render = render(set, ropts);
    real final_l2 = mse_l2(final_render, img);
    real final_loss = config.loss == LossKind::Rec
                          ? config.lambda * final_l2 +
                                (1.0 - config.lambda) * d_ssim(final_render, img)
                          : final_l2;
    log_point(iter, final_render, final_loss);
    checkpoint(iter);
    return result;
}

void write_metric_csv(const std::vector<LogEntry>& log, const std::string& path) {
    std::ofstream out(path);
    if (!out)
        throw io_error("cannot open '" + path + "' for writing");
    out << "iteration,elapsed_s,psnr,ms_ssim,loss,n_gaussians\n";
    for (const auto& e : log)
        out << e.iteration << "," << e.elapsed_s << "," << e.psnr << "," << e.ms_ssim << ","
            << e.loss << "," << e.n_gaussians << "\n";
    if (!out)
        throw io_error("short write to '" + path + "'");
}

} // namespace gs2d
