// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "gs2d/image.hpp"
#include "gs2d/ppm.hpp"

#include <vector>

namespace gs2d {

struct MetricReport {
    real psnr = 0.0;
    real ms_ssim = 0.0;
    real mse = 0.0;
    std::size_t gaussian_count = 0;
    real wall_time = 0.0; // seconds
};

/// Mean squared error over all pixels and channels. When `grad` is non-null
/// it receives dMSE/da = 2(a-b)/(H*W*3), laid out like ImageBuffer::data.
real mse_l2(const ImageBuffer& a, const ImageBuffer& b, std::vector<real>* grad = nullptr);

/// -10*log10(mse) for [0,1] images; +infinity when mse == 0.
real psnr(const ImageBuffer& a, const ImageBuffer& b);

/// SSIM with the standard 11x11 Gaussian window (sigma 1.5, K1=0.01,
/// K2=0.03, L=1), averaged over channels. Requires min(H,W) >= 11.
real ssim(const ImageBuffer& a, const ImageBuffer& b);

/// (1 - SSIM) / 2.
real d_ssim(const ImageBuffer& a, const ImageBuffer& b);

/// Multi-scale SSIM with the standard 5 weights; images too small for five
/// dyadic scales use as many scales as fit (>= 11 px) with renormalized
/// weights.
real ms_ssim(const ImageBuffer& a, const ImageBuffer& b);

/// lambda * L2 + (1 - lambda) * D-SSIM.
real rec_loss(const ImageBuffer& a, const ImageBuffer& b, real lambda);

/// Mean over pixels of alpha * (1 - e^-|d|)^gamma * d^2 with
/// d = p_pseudo - p_pred.
real focal_mse(const ProbabilityMap& p_pseudo, const ProbabilityMap& p_pred, real alpha,
               real gamma);

} // namespace gs2d
