#pragma once

// Shared test fixtures and independent oracles. Everything here must stay
// independent of the library code paths it checks.

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "qnmf/qmatrix.hpp"
#include "qnmf/rng.hpp"

namespace testsup {

using qnmf::QMatrix;
using qnmf::Quaternion;
using qnmf::RealMatrix;
using qnmf::RgbImage;
using qnmf::Rng;

inline Quaternion random_quat(Rng& rng) {
    return {rng.normal(), rng.normal(), rng.normal(), rng.normal()};
}

inline QMatrix random_qmatrix(int rows, int cols, Rng& rng) {
    QMatrix m(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) m(i, j) = random_quat(rng);
    return m;
}

// product of random factors: rank <= r
inline QMatrix random_lowrank(int rows, int cols, int r, Rng& rng) {
    const QMatrix a = random_qmatrix(rows, r, rng);
    const QMatrix b = random_qmatrix(r, cols, rng);
    return qnmf::qmat_mul(a, b);
}

inline QMatrix random_pure_qmatrix(int rows, int cols, Rng& rng) {
    QMatrix m(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) m(i, j) = {0.0, rng.normal(), rng.normal(), rng.normal()};
    return m;
}

// Deterministic textured test card: smooth gradients, rectangles, discs and
// stripes, self-similar enough for the patch pipeline.
inline RgbImage textured_card(int h, int w) {
    RgbImage img(h, w);
    for (int i = 0; i < h; ++i)
        for (int j = 0; j < w; ++j) {
            const size_t p = size_t(i) * w + j;
            double r = 120.0 + 80.0 * std::sin(2.0 * M_PI * j / 32.0);
            double g = 100.0 + 100.0 * (double(i) / h);
            double b = 90.0;
            if ((i / 16 + j / 16) % 2 == 0) { r = 200.0; g = 60.0; }
            const double dx = j - 0.7 * w, dy = i - 0.3 * h;
            if (dx * dx + dy * dy < 0.02 * h * w) { r = 30.0; g = 30.0; b = 220.0; }
            if (i % 24 < 4) b = 180.0;
            img.r[p] = std::clamp(r, 0.0, 255.0);
            img.g[p] = std::clamp(g, 0.0, 255.0);
            img.b[p] = std::clamp(b, 0.0, 255.0);
        }
    return img;
}

// Channels built from a few separable terms: each plane has rank <= 3 and
// values stay inside [0, 255] by construction.
inline RgbImage lowrank_card(int h, int w) {
    RgbImage img(h, w);
    for (int i = 0; i < h; ++i)
        for (int j = 0; j < w; ++j) {
            const size_t p = size_t(i) * w + j;
            const double si = std::sin(2.0 * M_PI * i / h), sj = std::sin(2.0 * M_PI * j / w);
            const double ci = std::cos(4.0 * M_PI * i / h), cj = std::cos(6.0 * M_PI * j / w);
            img.r[p] = 110.0 + 70.0 * si * sj + 40.0 * ci;
            img.g[p] = 120.0 + 60.0 * ci * cj + 35.0 * sj;
            img.b[p] = 100.0 + 50.0 * si * cj + 45.0 * ci;
        }
    return img;
}

// Two flat tones split by a curved boundary plus a disc; patch groups are
// near rank-1 while the global matrix is not.
inline RgbImage two_tone_card(int h, int w) {
    RgbImage img(h, w);
    for (int i = 0; i < h; ++i)
        for (int j = 0; j < w; ++j) {
            const size_t p = size_t(i) * w + j;
            const bool upper = i < h / 2 + int(0.2 * h * std::sin(2.0 * M_PI * j / w));
            const double dx = j - 0.3 * w, dy = i - 0.7 * h;
            const bool disc = dx * dx + dy * dy < 0.015 * h * w;
            img.r[p] = disc ? 220.0 : (upper ? 40.0 : 190.0);
            img.g[p] = disc ? 40.0 : (upper ? 90.0 : 160.0);
            img.b[p] = disc ? 60.0 : (upper ? 200.0 : 70.0);
        }
    return img;
}

// Direct periodic convolution, kernel anchored at its center cell; spatial
// loops only, the oracle counterpart of the FFT path.
inline QMatrix convolve_direct(const QMatrix& x, const RealMatrix& kernel) {
    const int h = x.rows(), w = x.cols();
    const int ch = kernel.rows / 2, cw = kernel.cols / 2;
    QMatrix out(h, w);
    for (int i = 0; i < h; ++i)
        for (int j = 0; j < w; ++j) {
            Quaternion s{};
            for (int u = 0; u < kernel.rows; ++u)
                for (int v = 0; v < kernel.cols; ++v) {
                    const int si = ((i - (u - ch)) % h + h) % h;
                    const int sj = ((j - (v - cw)) % w + w) % w;
                    s += x(si, sj) * kernel(u, v);
                }
            out(i, j) = s;
        }
    return out;
}

// 1/2 ||y - x||^2 + lambda (sum x_i - alpha ||x||_2), the vector objective the
// spectrum problem reduces to.
inline double l1l2_objective(const std::vector<double>& y, const std::vector<double>& x,
                             double lambda, double alpha) {
    double fid = 0.0, l1 = 0.0, l2sq = 0.0;
    for (size_t i = 0; i < y.size(); ++i) {
        fid += (y[i] - x[i]) * (y[i] - x[i]);
        l1 += x[i];
        l2sq += x[i] * x[i];
    }
    return 0.5 * fid + lambda * (l1 - alpha * std::sqrt(l2sq));
}

// Exact minimum of the objective above over the step-grid in [0, hi]^3,
// branch-and-bound with a provably safe lower bound: the separable part is
// minimized per coordinate and the concave -lambda*alpha*||x|| term is
// bounded by the largest corner norm, so no grid point below the incumbent
// is ever discarded. Only sorted triples need enumeration (the objective is
// coordinate-symmetric).
class GridOracle {
public:
    GridOracle(const std::array<double, 3>& y, double lambda, double alpha, double step)
        : y_{y}, lambda_{lambda}, alpha_{alpha}, step_{step} {
        double top = std::max({y[0], y[1], y[2]}) + lambda * (alpha + 1.0) + 0.5;
        n_ = int(std::ceil(top / step));
        best_ = eval_idx({0, 0, 0});
        best_ = std::min(best_, eval_idx(clamp_idx(y)));
    }

    double minimize() {
        std::array<int, 3> lo{0, 0, 0}, hi{n_, n_, n_};
        visit(lo, hi);
        return best_;
    }

    long nodes() const { return nodes_; }

private:
    std::array<int, 3> clamp_idx(const std::array<double, 3>& v) const {
        std::array<int, 3> r{};
        for (int i = 0; i < 3; ++i)
            r[i] = std::clamp(int(std::lround(v[i] / step_)), 0, n_);
        return r;
    }

    double eval_idx(const std::array<int, 3>& ix) const {
        double fid = 0.0, l1 = 0.0, l2sq = 0.0;
        for (int i = 0; i < 3; ++i) {
            const double x = ix[i] * step_;
            fid += (y_[i] - x) * (y_[i] - x);
            l1 += x;
            l2sq += x * x;
        }
        return 0.5 * fid + lambda_ * (l1 - alpha_ * std::sqrt(l2sq));
    }

    double lower_bound(const std::array<int, 3>& lo, const std::array<int, 3>& hi) const {
        double sep = 0.0, usq = 0.0;
        for (int i = 0; i < 3; ++i) {
            const double l = lo[i] * step_, u = hi[i] * step_;
            const double t = std::clamp(y_[i] - lambda_, l, u);
            sep += 0.5 * (y_[i] - t) * (y_[i] - t) + lambda_ * t;
            usq += u * u;
        }
        return sep - lambda_ * alpha_ * std::sqrt(usq);
    }

    void visit(std::array<int, 3> lo, std::array<int, 3> hi) {
        if (++nodes_ > 400'000'000L)
            throw std::runtime_error("GridOracle: node budget exhausted");
        // boxes fully outside the sorted cone x0 >= x1 >= x2 are redundant
        if (hi[0] < lo[1] || hi[1] < lo[2]) return;
        if (lower_bound(lo, hi) > best_) return;
        long cells = 1;
        for (int i = 0; i < 3; ++i) cells *= hi[i] - lo[i] + 1;
        if (cells <= 64) {
            std::array<int, 3> ix{};
            for (ix[0] = lo[0]; ix[0] <= hi[0]; ++ix[0])
                for (ix[1] = lo[1]; ix[1] <= std::min(hi[1], ix[0]); ++ix[1])
                    for (ix[2] = lo[2]; ix[2] <= std::min(hi[2], ix[1]); ++ix[2])
                        best_ = std::min(best_, eval_idx(ix));
            return;
        }
        int axis = 0;
        for (int i = 1; i < 3; ++i)
            if (hi[i] - lo[i] > hi[axis] - lo[axis]) axis = i;
        const int mid = lo[axis] + (hi[axis] - lo[axis]) / 2;
        auto hi1 = hi, lo2 = lo;
        hi1[axis] = mid;
        lo2[axis] = mid + 1;
        visit(lo, hi1);
        visit(lo2, hi);
    }

    std::array<double, 3> y_;
    double lambda_, alpha_, step_;
    int n_;
    double best_;
    long nodes_{0};
};

inline double grid_min_l1l2(const std::array<double, 3>& y, double lambda, double alpha,
                            double step) {
    GridOracle o(y, lambda, alpha, step);
    return o.minimize();
}

} // namespace testsup
