#pragma once

#include <cstdint>
#include <vector>

#include "qnmf/patches.hpp"
#include "qnmf/qmatrix.hpp"
#include "qnmf/solvers.hpp"

namespace qnmf {

// Denoising parameters as a function of the noise level (0-255 scale):
// patch side m, group size n, outer iteration count, lambda = 2c with
// c = sqrt(5 sqrt(2n) sigma), alpha = 4.
struct DenoiseSchedule {
    double sigma{0.0};
    int patch_side{4};
    int group_size{80};
    int outer_iters{4};
    double lambda{0.0};
    double alpha{4.0};
};

DenoiseSchedule schedule_lookup(double sigma);

// lambda = 2 sqrt(5 sqrt(2n) sigma^2): linear in the noise level, which puts
// the threshold mid-spectrum for pure-noise patch groups at every sigma.
inline double schedule_lambda(double sigma, int group_size) {
    return 2.0 * sigma * std::sqrt(5.0 * std::sqrt(2.0 * group_size));
}

struct KernelSpec {
    enum class Kind { uniform, gaussian, motion };
    Kind kind{Kind::uniform};
    int size{9};            // uniform / gaussian side
    double std_dev{1.6};    // gaussian
    int length{20};         // motion
    double angle_deg{60.0}; // motion, counter-clockwise from horizontal

    static KernelSpec uniform(int side) { return {Kind::uniform, side, 0.0, 0, 0.0}; }
    static KernelSpec gaussian(int side, double sd) { return {Kind::gaussian, side, sd, 0, 0.0}; }
    static KernelSpec motion(int len, double deg) { return {Kind::motion, 0, 0.0, len, deg}; }
};

// Nonnegative kernel summing to 1. Motion kernels are a one-pixel-wide
// rasterized segment with uniform weights on the support.
RealMatrix make_kernel(const KernelSpec& spec);

struct DegradationSpec {
    enum class Kind { gaussian_noise, impulse, blur, mask };
    Kind kind{Kind::gaussian_noise};
    double sigma{0.0};  // gaussian_noise, and additive noise after blur
    double rate{0.0};   // impulse rate / miss rate
    KernelSpec kernel;  // blur

    static DegradationSpec noise(double s) {
        DegradationSpec d;
        d.sigma = s;
        return d;
    }
    static DegradationSpec impulse(double r) {
        DegradationSpec d;
        d.kind = Kind::impulse;
        d.rate = r;
        return d;
    }
    static DegradationSpec blur(const KernelSpec& k, double s) {
        DegradationSpec d;
        d.kind = Kind::blur;
        d.kernel = k;
        d.sigma = s;
        return d;
    }
    static DegradationSpec mask(double miss) {
        DegradationSpec d;
        d.kind = Kind::mask;
        d.rate = miss;
        return d;
    }
};

struct Degraded {
    RgbImage image;
    RealMatrix mask;                    // 1 = observed (mask kind only)
    std::vector<size_t> corrupted_idx;  // impulse kind only, pixel indices
};

// Deterministic given (spec, seed). Impulse and mask corruption hit exactly
// round(rate * pixels) pixels. Impulse values are uniform in [0, 255] per
// channel; gaussian noise is i.i.d. per channel per pixel.
Degraded degrade(const RgbImage& img, const DegradationSpec& spec, uint64_t seed);

// Full non-local denoising pipeline: outer regularized iterations with
// residual-noise re-estimation, block matching on the current iterate,
// per-group truncated shrinkage, mean aggregation.
RgbImage nss_denoise(const RgbImage& noisy, double sigma, const DenoiseSchedule& sched);

enum class RestoreMode { global, nss };

struct NssRestoreOptions {
    PatchGroupSpec spec{5, 36, 30, 5};
    int outer_rounds{2};
};

// Inpainting from a binary mask (1 = observed).
RgbImage mc_restore(const RgbImage& obs, const RealMatrix& omega, RestoreMode mode,
                    const AdmmConfig& cfg, const NssRestoreOptions& opt = {},
                    SolverTrace* trace = nullptr);

struct RpcaRestoreResult {
    RgbImage image;
    QMatrix sparse;
};

// Impulse-noise removal via the low-rank + sparse split.
RpcaRestoreResult rpca_restore(const RgbImage& obs, RestoreMode mode, const AdmmConfig& cfg,
                               const NssRestoreOptions& opt = {}, SolverTrace* trace = nullptr);

// Tuned artifact defaults for image-scale (0-255) runs.
AdmmConfig mc_default_config(RestoreMode mode);
AdmmConfig rpca_default_config(RestoreMode mode, int rows, int cols);

} // namespace qnmf
