#include "qnmf/shrinkage.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qnmf {

namespace {

void check_params(const ShrinkParams& p) {
    if (!(p.lambda > 0.0)) throw std::invalid_argument("shrinkage: lambda must be > 0");
    if (!(p.alpha >= 0.0)) throw std::invalid_argument("shrinkage: alpha must be >= 0");
}

void check_sorted_nonneg(const std::vector<double>& s, bool need_nonneg) {
    for (size_t i = 0; i < s.size(); ++i) {
        if (need_nonneg && s[i] < 0.0) throw std::invalid_argument("shrinkage: negative input");
        if (i > 0 && s[i] > s[i - 1]) throw std::invalid_argument("shrinkage: input not sorted");
    }
}

} // namespace

std::vector<double> l1_minus_l2_prox(const std::vector<double>& sigma_y, const ShrinkParams& p) {
    check_params(p);
    check_sorted_nonneg(sigma_y, true);
    std::vector<double> z(sigma_y.size());
    double nsq = 0.0;
    for (size_t i = 0; i < sigma_y.size(); ++i) {
        z[i] = std::max(sigma_y[i] - p.lambda, 0.0);
        nsq += z[i] * z[i];
    }
    if (nsq == 0.0) return z;
    const double scale = (std::sqrt(nsq) + p.alpha * p.lambda) / std::sqrt(nsq);
    for (auto& v : z) v *= scale;
    return z;
}

ShrinkResult qnmf_shrink(const std::vector<double>& sigma_y, const ShrinkParams& p) {
    check_params(p);
    check_sorted_nonneg(sigma_y, false);
    ShrinkResult r;
    r.sigma_out.resize(sigma_y.size());
    double nsq = 0.0;
    for (double s : sigma_y) {
        const double z = s > p.lambda ? s - 0.5 * p.lambda : 0.0;
        nsq += z * z;
    }
    r.z_norm = std::sqrt(nsq);
    r.k_multiplier = (p.alpha == 0.0 || r.z_norm == 0.0)
                         ? 1.0
                         : 1.0 + p.alpha * p.lambda / (2.0 * r.z_norm);
    const double cutoff = r.k_multiplier > 1.0
                              ? r.k_multiplier * p.lambda / (2.0 * (r.k_multiplier - 1.0))
                              : std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < sigma_y.size(); ++i) {
        const double s = sigma_y[i];
        if (s > cutoff)
            r.sigma_out[i] = s;
        else if (s > p.lambda)
            r.sigma_out[i] = std::min(r.k_multiplier * (s - 0.5 * p.lambda), s);
        else
            r.sigma_out[i] = 0.0;
    }
    return r;
}

SpectrumShrinkOutcome qnmf_denoise_spectrum(const QMatrix& y, const ShrinkParams& p,
                                            ShrinkMode mode) {
    check_params(p);
    return qsvd_shrink_spectrum(y, [&](const std::vector<double>& s) {
        return mode == ShrinkMode::theorem ? l1_minus_l2_prox(s, p)
                                           : qnmf_shrink(s, p).sigma_out;
    });
}

QMatrix qnmf_denoise(const QMatrix& y, const ShrinkParams& p, ShrinkMode mode) {
    return qnmf_denoise_spectrum(y, p, mode).result;
}

QMatrix soft_threshold_quat(const QMatrix& q, double tau) {
    if (!(tau >= 0.0)) throw std::invalid_argument("soft_threshold_quat: tau must be >= 0");
    QMatrix out(q.rows(), q.cols());
    for (int i = 0; i < q.rows(); ++i)
        for (int j = 0; j < q.cols(); ++j) {
            const Quaternion& e = q(i, j);
            const double mod = e.abs();
            const double kept = std::max(mod - tau, 0.0);
            if (kept > 0.0) out(i, j) = e * (kept / (mod + kSoftThresholdEps));
        }
    return out;
}

} // namespace qnmf
