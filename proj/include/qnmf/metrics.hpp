#pragma once

#include "qnmf/qmatrix.hpp"

namespace qnmf {

struct QualityReport {
    double psnr{0.0};
    double ssim{0.0};
};

// 10*log10(255^2 / MSE), MSE over all pixels of all three channels.
// Identical images report the 99 dB sentinel.
double psnr(const RgbImage& ref, const RgbImage& test);

// Mean of per-channel SSIM with an 11x11 Gaussian window (std 1.5),
// C1 = (0.01*255)^2, C2 = (0.03*255)^2, valid-region filtering.
// Requires min(height, width) >= 11.
double ssim(const RgbImage& ref, const RgbImage& test);

QualityReport quality(const RgbImage& ref, const RgbImage& test);

// Blind noise-level estimate: per-channel median absolute value of the
// finest diagonal high-pass residual scaled by 1/0.6745, averaged over
// channels. Requires at least 16x16.
double estimate_noise(const RgbImage& img);

} // namespace qnmf
