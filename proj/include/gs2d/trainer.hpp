// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "gs2d/gaussian.hpp"
#include "gs2d/geometry.hpp"
#include "gs2d/image.hpp"
#include "gs2d/metrics.hpp"
#include "gs2d/rasterizer.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace gs2d {

enum class LossKind { L2, Rec };
enum class InitKind { Random, Structured, Quadtree };
enum class PpmSource { Gradient, Pseudo };

struct FitConfig {
    int iterations = 10000;
    real lr = 1e-3;
    real beta1 = 0.9;
    real beta2 = 0.999;
    real adam_eps = 1e-8;
    LossKind loss = LossKind::L2;
    real lambda = 1.0; // rec-loss mix; 1 keeps the path pure L2
    InitKind init = InitKind::Random;
    std::size_t num_gaussians = 0; // random init only
    int kernel = 3;                // structured init patch size
    PpmSource ppm_source = PpmSource::Gradient;
    std::vector<Vec2> pseudo_positions; // pixel coords, for PpmSource::Pseudo
    std::uint64_t seed = 0;
    int log_every = 0;       // 0 = log only iteration 0 and the end
    real time_budget = 0.0;  // seconds; 0 = unlimited
    bool cosine_lr = false;  // decay lr -> lr_min over the run
    real lr_min = 1e-5;
    int checkpoint_every = 0;
    std::string checkpoint_path; // "@ITER@" expands to the iteration number
    real cutoff_sigma = 3.0;
    bool init_gain = true; // least-squares brightness gain after structured init
};

struct AdamState {
    std::vector<real> m;
    std::vector<real> v;
    long step = 0;
};

struct LogEntry {
    int iteration = 0;
    real elapsed_s = 0.0;
    real psnr = 0.0;
    real ms_ssim = 0.0;
    real loss = 0.0;
    std::size_t n_gaussians = 0;
};

struct FitResult {
    GaussianSet set;
    std::vector<LogEntry> log;
    bool stopped_by_budget = false;
};

/// One bias-corrected Adam update over a flat parameter vector. Gradients
/// must be finite (throws std::domain_error otherwise).
void adam_step(std::vector<real>& params, const std::vector<real>& grads, AdamState& state,
               real lr, real beta1 = 0.9, real beta2 = 0.999, real eps = 1e-8);

struct StructuredInitOptions {
    int kernel = 3;
    PpmSource ppm_source = PpmSource::Gradient;
    std::vector<Vec2> pseudo_positions;
    real color_weight = 0.5; // sigmoid(0)
    bool gain_calibration = true;
    real cutoff_sigma = 3.0;
};

/// Probability map -> max-pool -> dithering -> boundary augmentation ->
/// Delaunay -> one gaussian per triangle from its fitted ellipse. The count
/// is data-dependent; re-running on the same inputs is bit-identical.
GaussianSet structured_init(const ImageBuffer& img, const StructuredInitOptions& opts = {});

/// Seeds one gaussian at the center of each quadtree leaf; produces the
/// reference decompositions consumed by the pseudo probability map.
GaussianSet quadtree_init(const ImageBuffer& img, real mse_threshold = 0.02, int min_size = 4);

/// render -> loss -> backward -> Adam, with periodic metric logging and
/// optional checkpoints. Deterministic for a fixed seed and config,
/// independent of thread count.
FitResult fit(const ImageBuffer& img, const FitConfig& config);

/// Pixel-space positions of a set's gaussians (pseudo-PPM input).
std::vector<Vec2> gaussian_pixel_positions(const GaussianSet& set);

void write_metric_csv(const std::vector<LogEntry>& log, const std::string& path);

} // namespace gs2d
