// SPDX-License-Identifier: Apache-2.0
#include "gs2d/metrics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace gs2d {

namespace {

void require_same_size(const ImageBuffer& a, const ImageBuffer& b, const char* op) {
    if (a.width != b.width || a.height != b.height)
        throw std::invalid_argument(std::string(op) + ": image dimensions differ");
}

constexpr int kWindow = 11;
constexpr real kC1 = 0.01 * 0.01; // (K1*L)^2, L=1
constexpr real kC2 = 0.03 * 0.03;

const std::array<real, kWindow>& gaussian_window() {
    static const std::array<real, kWindow> w = [] {
        std::array<real, kWindow> v{};
        real sum = 0.0;
        for (int i = 0; i < kWindow; ++i) {
            real d = i - (kWindow - 1) / 2.0;
            v[i] = std::exp(-d * d / (2.0 * 1.5 * 1.5));
            sum += v[i];
        }
        for (auto& x : v)
            x /= sum;
        return v;
    }();
    return w;
}

// Separable valid-region filter of a single channel; out is (h-10) x (w-10).
std::vector<real> filter_valid(const std::vector<real>& in, int w, int h) {
    const auto& win = gaussian_window();
    const int ow = w - kWindow + 1;
    const int oh = h - kWindow + 1;
    std::vector<real> tmp(static_cast<std::size_t>(ow) * h);
    for (int i = 0; i < h; ++i)
        for (int j = 0; j < ow; ++j) {
            real s = 0.0;
            for (int t = 0; t < kWindow; ++t)
                s += win[t] * in[static_cast<std::size_t>(i) * w + j + t];
            tmp[static_cast<std::size_t>(i) * ow + j] = s;
        }
    std::vector<real> out(static_cast<std::size_t>(ow) * oh);
    for (int i = 0; i < oh; ++i)
        for (int j = 0; j < ow; ++j) {
            real s = 0.0;
            for (int t = 0; t < kWindow; ++t)
                s += win[t] * tmp[static_cast<std::size_t>(i + t) * ow + j];
            out[static_cast<std::size_t>(i) * ow + j] = s;
        }
    return out;
}

struct SsimTerms {
    real mean_ssim = 0.0;
    real mean_cs = 0.0;
};

SsimTerms ssim_channel(const std::vector<real>& x, const std::vector<real>& y, int w, int h) {
    auto mu_x = filter_valid(x, w, h);
    auto mu_y = filter_valid(y, w, h);

    std::vector<real> xx(x.size()), yy(x.size()), xy(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        xx[i] = x[i] * x[i];
        yy[i] = y[i] * y[i];
        xy[i] = x[i] * y[i];
    }
    auto m_xx = filter_valid(xx, w, h);
    auto m_yy = filter_valid(yy, w, h);
    auto m_xy = filter_valid(xy, w, h);

    real ssim_sum = 0.0;
    real cs_sum = 0.0;
    for (std::size_t i = 0; i < mu_x.size(); ++i) {
        real mx = mu_x[i], my = mu_y[i];
        real var_x = m_xx[i] - mx * mx;
        real var_y = m_yy[i] - my * my;
        real cov = m_xy[i] - mx * my;
        real cs = (2.0 * cov + kC2) / (var_x + var_y + kC2);
        real lum = (2.0 * mx * my + kC1) / (mx * mx + my * my + kC1);
        ssim_sum += lum * cs;
        cs_sum += cs;
    }
    real n = static_cast<real>(mu_x.size());
    return {ssim_sum / n, cs_sum / n};
}

SsimTerms ssim_terms(const ImageBuffer& a, const ImageBuffer& b) {
    const int w = a.width, h = a.height;
    std::vector<real> ca(static_cast<std::size_t>(w) * h), cb(ca.size());
    SsimTerms acc;
    for (int ch = 0; ch < 3; ++ch) {
        for (int i = 0; i < h; ++i)
            for (int j = 0; j < w; ++j) {
                ca[static_cast<std::size_t>(i) * w + j] = a.at(i, j, ch);
                cb[static_cast<std::size_t>(i) * w + j] = b.at(i, j, ch);
            }
        SsimTerms t = ssim_channel(ca, cb, w, h);
        acc.mean_ssim += t.mean_ssim / 3.0;
        acc.mean_cs += t.mean_cs / 3.0;
    }
    return acc;
}

ImageBuffer downsample2(const ImageBuffer& img) {
    int ow = img.width / 2;
    int oh = img.height / 2;
    ImageBuffer out(ow, oh);
    for (int i = 0; i < oh; ++i)
        for (int j = 0; j < ow; ++j)
            for (int c = 0; c < 3; ++c)
                out.at(i, j, c) = 0.25 * (img.at(2 * i, 2 * j, c) + img.at(2 * i, 2 * j + 1, c) +
                                          img.at(2 * i + 1, 2 * j, c) +
                                          img.at(2 * i + 1, 2 * j + 1, c));
    return out;
}

} // namespace

real mse_l2(const ImageBuffer& a, const ImageBuffer& b, std::vector<real>* grad) {
    require_same_size(a, b, "mse_l2");
    const std::size_t n = a.data.size();
    if (grad)
        grad->resize(n);
    real sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        real d = a.data[i] - b.data[i];
        sum += d * d;
        if (grad)
            (*grad)[i] = 2.0 * d / static_cast<real>(n);
    }
    return sum / static_cast<real>(n);
}

real psnr(const ImageBuffer& a, const ImageBuffer& b) {
    real mse = mse_l2(a, b);
    if (mse <= 0.0)
        return std::numeric_limits<real>::infinity();
    return -10.0 * std::log10(mse);
}

real ssim(const ImageBuffer& a, const ImageBuffer& b) {
    require_same_size(a, b, "ssim");
    if (std::min(a.width, a.height) < kWindow)
        throw std::invalid_argument("ssim: image smaller than the 11x11 window");
    return ssim_terms(a, b).mean_ssim;
}

real d_ssim(const ImageBuffer& a, const ImageBuffer& b) { return (1.0 - ssim(a, b)) / 2.0; }

real ms_ssim(const ImageBuffer& a, const ImageBuffer& b) {
    require_same_size(a, b, "ms_ssim");
    static const std::array<real, 5> kWeights = {0.0448, 0.2856, 0.3001, 0.2363, 0.1333};

    int scales = 0;
    int dim = std::min(a.width, a.height);
    while (scales < 5 && dim >= kWindow) {
        ++scales;
        dim /= 2;
    }
    if (scales == 0)
        throw std::invalid_argument("ms_ssim: image smaller than the 11x11 window");

    real wsum = 0.0;
    for (int s = 0; s < scales; ++s)
        wsum += kWeights[s];

    ImageBuffer xa = a, xb = b;
    real result = 1.0;
    for (int s = 0; s < scales; ++s) {
        SsimTerms t = ssim_terms(xa, xb);
        real weight = kWeights[s] / wsum;
        if (s + 1 < scales) {
            result *= std::pow(std::max(t.mean_cs, 0.0), weight);
            xa = downsample2(xa);
            xb = downsample2(xb);
        } else {
            result *= std::pow(std::max(t.mean_ssim, 0.0), weight);
        }
    }
    return result;
}

real rec_loss(const ImageBuffer& a, const ImageBuffer& b, real lambda) {
    require_same_size(a, b, "rec_loss");
    real l2 = mse_l2(a, b);
    if (lambda == 1.0)
        return l2;
    return lambda * l2 + (1.0 - lambda) * d_ssim(a, b);
}

real focal_mse(const ProbabilityMap& p_pseudo, const ProbabilityMap& p_pred, real alpha,
               real gamma) {
    if (p_pseudo.width != p_pred.width || p_pseudo.height != p_pred.height)
        throw std::invalid_argument("focal_mse: map dimensions differ");
    real sum = 0.0;
    for (std::size_t i = 0; i < p_pseudo.values.size(); ++i) {
        real d = p_pseudo.values[i] - p_pred.values[i];
        real wgt = std::pow(1.0 - std::exp(-std::abs(d)), gamma);
        sum += alpha * wgt * d * d;
    }
    return sum / static_cast<real>(p_pseudo.values.size());
}

} // namespace gs2d
