#include "qnmf/imaging.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include "qnmf/fft.hpp"
#include "qnmf/rng.hpp"
#include "qnmf/shrinkage.hpp"
#include "qnmf/thread_pool.hpp"

namespace qnmf {

DenoiseSchedule schedule_lookup(double sigma) {
    if (!(sigma > 0.0)) throw std::invalid_argument("schedule_lookup: sigma must be > 0");
    DenoiseSchedule s;
    s.sigma = sigma;
    if (sigma <= 5.0) {
        s.patch_side = 4; s.group_size = 80; s.outer_iters = 4;
    } else if (sigma <= 20.0) {
        s.patch_side = 4; s.group_size = 80; s.outer_iters = 6;
    } else if (sigma <= 40.0) {
        s.patch_side = 5; s.group_size = 90; s.outer_iters = 8;
    } else if (sigma <= 60.0) {
        s.patch_side = 5; s.group_size = 120; s.outer_iters = 9;
    } else {
        s.patch_side = 5; s.group_size = 140; s.outer_iters = 10;
    }
    s.lambda = schedule_lambda(sigma, s.group_size);
    s.alpha = 4.0;
    return s;
}

RealMatrix make_kernel(const KernelSpec& spec) {
    switch (spec.kind) {
        case KernelSpec::Kind::uniform: {
            if (spec.size < 1) throw std::invalid_argument("make_kernel: bad uniform size");
            RealMatrix k(spec.size, spec.size, 1.0 / (double(spec.size) * spec.size));
            return k;
        }
        case KernelSpec::Kind::gaussian: {
            if (spec.size < 1 || !(spec.std_dev > 0.0))
                throw std::invalid_argument("make_kernel: bad gaussian parameters");
            RealMatrix k(spec.size, spec.size);
            const double c = (spec.size - 1) / 2.0;
            double sum = 0.0;
            for (int i = 0; i < spec.size; ++i)
                for (int j = 0; j < spec.size; ++j) {
                    const double d2 = (i - c) * (i - c) + (j - c) * (j - c);
                    k(i, j) = std::exp(-0.5 * d2 / (spec.std_dev * spec.std_dev));
                    sum += k(i, j);
                }
            for (auto& v : k.v) v /= sum;
            return k;
        }
        case KernelSpec::Kind::motion: {
            if (spec.length < 1) throw std::invalid_argument("make_kernel: bad motion length");
            const double th = spec.angle_deg * M_PI / 180.0;
            const double dx = std::cos(th), dy = std::sin(th);
            // one sample per unit of motion length; image rows grow downward
            std::set<std::pair<int, int>> cells;
            for (int i = 0; i < spec.length; ++i) {
                const double s = i - (spec.length - 1) / 2.0;
                cells.insert({int(std::lround(-s * dy)), int(std::lround(s * dx))});
            }
            int rmin = 0, rmax = 0, cmin = 0, cmax = 0;
            for (const auto& [r, c] : cells) {
                rmin = std::min(rmin, r); rmax = std::max(rmax, r);
                cmin = std::min(cmin, c); cmax = std::max(cmax, c);
            }
            RealMatrix k(rmax - rmin + 1, cmax - cmin + 1);
            const double w = 1.0 / double(cells.size());
            for (const auto& [r, c] : cells) k(r - rmin, c - cmin) = w;
            return k;
        }
    }
    throw std::logic_error("make_kernel: bad kind");
}

Degraded degrade(const RgbImage& img, const DegradationSpec& spec, uint64_t seed) {
    Rng rng(seed);
    Degraded out;
    out.image = img;
    switch (spec.kind) {
        case DegradationSpec::Kind::gaussian_noise: {
            if (spec.sigma < 0.0) throw std::invalid_argument("degrade: sigma must be >= 0");
            if (spec.sigma == 0.0) break;
            for (size_t p = 0; p < img.pixels(); ++p) {
                out.image.r[p] += spec.sigma * rng.normal();
                out.image.g[p] += spec.sigma * rng.normal();
                out.image.b[p] += spec.sigma * rng.normal();
            }
            break;
        }
        case DegradationSpec::Kind::impulse: {
            if (spec.rate < 0.0 || spec.rate > 1.0)
                throw std::invalid_argument("degrade: impulse rate outside [0, 1]");
            const size_t count = size_t(std::llround(spec.rate * double(img.pixels())));
            out.corrupted_idx = sample_indices(img.pixels(), count, rng);
            for (size_t p : out.corrupted_idx) {
                out.image.r[p] = rng.uniform(0.0, 255.0);
                out.image.g[p] = rng.uniform(0.0, 255.0);
                out.image.b[p] = rng.uniform(0.0, 255.0);
            }
            break;
        }
        case DegradationSpec::Kind::blur: {
            const RealMatrix kernel = make_kernel(spec.kernel);
            QMatrix q = rgb_encode(img);
            q = convolve_periodic(q, kernel);
            out.image = rgb_decode(q);
            if (spec.sigma > 0.0)
                for (size_t p = 0; p < img.pixels(); ++p) {
                    out.image.r[p] += spec.sigma * rng.normal();
                    out.image.g[p] += spec.sigma * rng.normal();
                    out.image.b[p] += spec.sigma * rng.normal();
                }
            break;
        }
        case DegradationSpec::Kind::mask: {
            if (spec.rate < 0.0 || spec.rate > 1.0)
                throw std::invalid_argument("degrade: miss rate outside [0, 1]");
            out.mask = RealMatrix(img.height, img.width, 1.0);
            const size_t count = size_t(std::llround(spec.rate * double(img.pixels())));
            for (size_t p : sample_indices(img.pixels(), count, rng)) {
                out.mask.v[p] = 0.0;
                out.image.r[p] = 0.0;
                out.image.g[p] = 0.0;
                out.image.b[p] = 0.0;
            }
            break;
        }
    }
    return out;
}

namespace {

struct ShrunkGroup {
    std::vector<PatchPos> positions;
    QMatrix denoised;
};

QMatrix nss_shrink_pass(const QMatrix& target, const QMatrix& match_img,
                        const PatchGroupSpec& spec, const ShrinkParams& sp) {
    const auto refs = reference_positions(target.rows(), target.cols(), spec.patch_side, spec.stride);
    GroupAggregator agg(target.rows(), target.cols());
    chunked_parallel_map<ShrunkGroup>(
        refs.size(), 512,
        [&](size_t i) {
            ShrunkGroup g;
            g.positions = block_match(match_img, refs[i], spec);
            g.denoised = qnmf_denoise(extract_group(target, g.positions, spec.patch_side), sp,
                                      ShrinkMode::truncated);
            return g;
        },
        [&](size_t, ShrunkGroup& g) { agg.add(g.denoised, g.positions, spec.patch_side); });
    return agg.finalize(target);
}

RealMatrix extract_mask_group(const RealMatrix& mask, const std::vector<PatchPos>& positions,
                              int m) {
    RealMatrix g(m * m, int(positions.size()));
    for (size_t p = 0; p < positions.size(); ++p) {
        const auto [r, c] = positions[p];
        for (int v = 0; v < m; ++v)
            for (int u = 0; u < m; ++u) g(v * m + u, int(p)) = mask(r + u, c + v);
    }
    return g;
}

} // namespace

RgbImage nss_denoise(const RgbImage& noisy, double sigma, const DenoiseSchedule& sched) {
    if (!(sigma > 0.0)) throw std::invalid_argument("nss_denoise: sigma must be > 0");
    if (noisy.height < sched.patch_side || noisy.width < sched.patch_side)
        throw std::invalid_argument("nss_denoise: image smaller than patch grid");

    const PatchGroupSpec spec{sched.patch_side, sched.group_size, 30, 4};
    const QMatrix y = rgb_encode(noisy);
    QMatrix x = y;
    constexpr double delta = 0.1;
    for (int t = 0; t < sched.outer_iters; ++t) {
        const QMatrix y_t = x + (y - x) * delta;
        const double resid = frobenius_distance(y, x);
        const double sigma_t = std::sqrt(
            std::max(sigma * sigma - resid * resid / (3.0 * double(noisy.pixels())), 0.0));
        const double lambda_t =
            std::max(schedule_lambda(std::max(sigma_t, 1e-6), sched.group_size), 1e-8);
        x = nss_shrink_pass(y_t, x, spec, {lambda_t, sched.alpha});
    }
    return rgb_decode(x);
}

RgbImage mc_restore(const RgbImage& obs, const RealMatrix& omega, RestoreMode mode,
                    const AdmmConfig& cfg, const NssRestoreOptions& opt, SolverTrace* trace) {
    if (obs.height != omega.rows || obs.width != omega.cols)
        throw std::invalid_argument("mc_restore: mask shape mismatch");
    const QMatrix y = hadamard(rgb_encode(obs), omega);

    if (mode == RestoreMode::global) {
        auto res = solve_matrix_completion(y, omega, cfg);
        if (trace) *trace = std::move(res.trace);
        return rgb_decode(res.x);
    }

    // block matching needs a structured starting point: seed with the global
    // solve, then refine it group by group
    QMatrix x = solve_matrix_completion(y, omega, mc_default_config(RestoreMode::global)).x;

    const auto refs = reference_positions(obs.height, obs.width, opt.spec.patch_side,
                                          opt.spec.stride);
    for (int round = 0; round < opt.outer_rounds; ++round) {
        const QMatrix match_img = x;
        GroupAggregator agg(obs.height, obs.width);
        chunked_parallel_map<ShrunkGroup>(
            refs.size(), 256,
            [&](size_t i) {
                ShrunkGroup g;
                g.positions = block_match(match_img, refs[i], opt.spec);
                const QMatrix gy = extract_group(y, g.positions, opt.spec.patch_side);
                const RealMatrix gm = extract_mask_group(omega, g.positions, opt.spec.patch_side);
                const QMatrix gx = extract_group(match_img, g.positions, opt.spec.patch_side);
                bool any = false;
                for (double v : gm.v)
                    if (v != 0.0) { any = true; break; }
                if (!any) {
                    g.denoised = gx;
                } else {
                    g.denoised = solve_matrix_completion(gy, gm, cfg, &gx).x;
                }
                return g;
            },
            [&](size_t, ShrunkGroup& g) { agg.add(g.denoised, g.positions, opt.spec.patch_side); });
        x = agg.finalize(x);
    }
    if (trace) *trace = SolverTrace{};
    return rgb_decode(x);
}

RpcaRestoreResult rpca_restore(const RgbImage& obs, RestoreMode mode, const AdmmConfig& cfg,
                               const NssRestoreOptions& opt, SolverTrace* trace) {
    const QMatrix y = rgb_encode(obs);
    RpcaRestoreResult out;

    if (mode == RestoreMode::global) {
        auto res = solve_rpca(y, cfg);
        if (trace) *trace = std::move(res.trace);
        out.image = rgb_decode(res.x);
        out.sparse = std::move(res.z);
        return out;
    }

    QMatrix x = y;
    QMatrix sparse(y.rows(), y.cols());
    const auto refs = reference_positions(obs.height, obs.width, opt.spec.patch_side,
                                          opt.spec.stride);
    for (int round = 0; round < opt.outer_rounds; ++round) {
        const QMatrix match_img = x;
        GroupAggregator agg(obs.height, obs.width);
        GroupAggregator agg_sparse(obs.height, obs.width);
        chunked_parallel_map<std::pair<ShrunkGroup, QMatrix>>(
            refs.size(), 256,
            [&](size_t i) {
                std::pair<ShrunkGroup, QMatrix> g;
                g.first.positions = block_match(match_img, refs[i], opt.spec);
                const QMatrix gy = extract_group(y, g.first.positions, opt.spec.patch_side);
                auto res = solve_rpca(gy, cfg);
                g.first.denoised = std::move(res.x);
                g.second = std::move(res.z);
                return g;
            },
            [&](size_t, std::pair<ShrunkGroup, QMatrix>& g) {
                agg.add(g.first.denoised, g.first.positions, opt.spec.patch_side);
                agg_sparse.add(g.second, g.first.positions, opt.spec.patch_side);
            });
        x = agg.finalize(x);
        sparse = agg_sparse.finalize(QMatrix(y.rows(), y.cols()));
    }
    if (trace) *trace = SolverTrace{};
    out.image = rgb_decode(x);
    out.sparse = std::move(sparse);
    return out;
}

AdmmConfig mc_default_config(RestoreMode mode) {
    AdmmConfig cfg;
    cfg.alpha = 4.0;
    cfg.tol = 1e-4;
    cfg.mode = ShrinkMode::truncated;
    if (mode == RestoreMode::global) {
        cfg.lambda = 500.0;
        cfg.beta0 = 0.05;
        cfg.mu = 1.1;
        cfg.max_iter = 300;
    } else {
        // per-group refinement: warm-started, annealing from mid-spectrum
        cfg.lambda = 150.0;
        cfg.beta0 = 0.05;
        cfg.mu = 1.15;
        cfg.max_iter = 60;
        cfg.tol = 1e-5;
    }
    return cfg;
}

AdmmConfig rpca_default_config(RestoreMode mode, int rows, int cols) {
    AdmmConfig cfg;
    cfg.alpha = 4.0;
    cfg.tol = 1e-4;
    cfg.mode = ShrinkMode::truncated;
    if (mode == RestoreMode::global) {
        cfg.lambda = 400.0;
        cfg.beta0 = 0.02;
        cfg.mu = 1.1;
        cfg.max_iter = 300;
    } else {
        cfg.lambda = 120.0;
        cfg.beta0 = 0.02;
        cfg.mu = 1.25;
        cfg.max_iter = 80;
    }
    cfg.rho = cfg.lambda / std::sqrt(double(std::max(rows, cols)));
    return cfg;
}

} // namespace qnmf
