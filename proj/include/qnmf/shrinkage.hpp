#pragma once

#include <limits>
#include <vector>

#include "qnmf/qmatrix.hpp"
#include "qnmf/qsvd.hpp"

namespace qnmf {

struct ShrinkParams {
    double lambda{1.0}; // threshold, > 0
    double alpha{0.0};  // Frobenius weight, >= 0; 0 reduces to nuclear-norm shrinkage
};

struct ShrinkResult {
    std::vector<double> sigma_out;
    double k_multiplier{1.0}; // 1 when z = 0 or alpha = 0
    double z_norm{0.0};
};

// Exact minimizer of 1/2*||s_y - s||^2 + lambda*(||s||_1 - alpha*||s||_2) over
// nonnegative ordered vectors: ((||z|| + alpha*lambda)/||z||) * z with
// z = max(s_y - lambda, 0); zero vector when z = 0.
// Input must be nonnegative and non-increasing.
std::vector<double> l1_minus_l2_prox(const std::vector<double>& sigma_y, const ShrinkParams& p);

// Truncated variant: values above K*lambda/(2*(K-1)) pass through unchanged,
// values in (lambda, cutoff] become K*(s - lambda/2), the rest are zeroed;
// K = 1 + alpha*lambda/(2*||z||) with z_i = s_i - lambda/2 where s_i > lambda.
// The cutoff is +inf when K = 1, disabling the pass-through branch. Output
// never exceeds the input and stays non-increasing.
ShrinkResult qnmf_shrink(const std::vector<double>& sigma_y, const ShrinkParams& p);

enum class ShrinkMode { theorem, truncated };

// QSVD of y, spectrum shrinkage in the chosen mode, reconstruction.
QMatrix qnmf_denoise(const QMatrix& y, const ShrinkParams& p, ShrinkMode mode);

// Same, also reporting input/output spectra (used for solver traces).
SpectrumShrinkOutcome qnmf_denoise_spectrum(const QMatrix& y, const ShrinkParams& p,
                                            ShrinkMode mode);

// Entrywise q <- (q/(|q|+eps)) * max(|q| - tau, 0); keeps each quaternion's
// direction and shrinks its modulus.
QMatrix soft_threshold_quat(const QMatrix& q, double tau);

inline constexpr double kSoftThresholdEps = 1e-12;

} // namespace qnmf
