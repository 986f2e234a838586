// Acceptance suite: every criterion prints one PASS/FAIL line; doctest
// assertions carry the verdicts. Criterion 8 is conditional on a local
// Kodak directory and reports deltas without asserting.

#include <doctest.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <string>
#include <vector>

#include <sys/wait.h>
#include <unistd.h>

#include "qnmf/complex_svd.hpp"
#include "qnmf/image_io.hpp"
#include "qnmf/imaging.hpp"
#include "qnmf/metrics.hpp"
#include "qnmf/qsvd.hpp"
#include "qnmf/shrinkage.hpp"
#include "qnmf/solvers.hpp"
#include "support.hpp"

using namespace qnmf;
namespace fs = std::filesystem;

namespace {

struct Stopwatch {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
};

void verdict(int criterion, bool pass, const std::string& what, double secs) {
    std::printf("[criterion %2d] %s  %s (%.1fs)\n", criterion, pass ? "PASS" : "FAIL",
                what.c_str(), secs);
    std::fflush(stdout);
}

double unitarity_defect(const QMatrix& u) {
    return frobenius_distance(qmat_mul(hermitian_transpose(u), u), QMatrix::identity(u.cols()));
}

// the three synthetic solver instances shared by criteria 5 and 6
struct SolverInstances {
    LinearInverseResult deblur;
    AdmmConfig deblur_cfg;
    CompletionResult mc;
    AdmmConfig mc_cfg;
    QMatrix mc_truth;
    RpcaResult rpca;
    AdmmConfig rpca_cfg;
    QMatrix rpca_truth;
    std::vector<size_t> rpca_corrupted;
    double seconds{0.0};
};

const SolverInstances& solver_instances() {
    static const SolverInstances inst = [] {
        SolverInstances s;
        Stopwatch sw;

        // 64x64 deblur: uniform 9x9 kernel plus sigma = 2 noise, global mode
        {
            const RgbImage card = testsup::textured_card(64, 64);
            const RealMatrix kernel = make_kernel(KernelSpec::uniform(9));
            const RgbImage obs =
                degrade(card, DegradationSpec::blur(KernelSpec::uniform(9), 2.0), 51).image;
            s.deblur_cfg.gamma = 50.0;
            s.deblur_cfg.lambda = 100.0;
            s.deblur_cfg.alpha = 4.0;
            s.deblur_cfg.beta0 = 0.02;
            s.deblur_cfg.mu = 1.1;
            s.deblur_cfg.max_iter = 300;
            s.deblur_cfg.tol = 1e-4;
            s.deblur = solve_linear_inverse(rgb_encode(obs),
                                            LinearOperator::convolution_op(kernel), s.deblur_cfg);
        }

        // 50x50 completion at 50% observed
        {
            Rng rng(137);
            s.mc_truth = testsup::random_lowrank(50, 50, 5, rng);
            RealMatrix omega(50, 50, 0.0);
            for (auto& v : omega.v) v = rng.uniform() < 0.5 ? 1.0 : 0.0;
            s.mc_cfg.lambda = 5.0;
            s.mc_cfg.alpha = 4.0;
            s.mc_cfg.beta0 = 0.02;
            s.mc_cfg.mu = 1.1;
            s.mc_cfg.max_iter = 300;
            s.mc_cfg.tol = 1e-4;
            s.mc = solve_matrix_completion(hadamard(s.mc_truth, omega), omega, s.mc_cfg);
        }

        // 50x50 rpca at 5% impulses of magnitude 100
        {
            Rng rng(149);
            s.rpca_truth = testsup::random_lowrank(50, 50, 5, rng);
            QMatrix y = s.rpca_truth;
            s.rpca_corrupted = sample_indices(2500, 125, rng);
            for (size_t p : s.rpca_corrupted) {
                Quaternion dir = testsup::random_quat(rng);
                dir *= 100.0 / dir.abs();
                y.data()[p] += dir;
            }
            s.rpca_cfg.lambda = 5.0;
            s.rpca_cfg.alpha = 4.0;
            s.rpca_cfg.rho = 5.0 / std::sqrt(50.0);
            s.rpca_cfg.beta0 = 0.01;
            s.rpca_cfg.mu = 1.1;
            s.rpca_cfg.max_iter = 300;
            s.rpca_cfg.tol = 1e-4;
            s.rpca = solve_rpca(y, s.rpca_cfg);
        }
        s.seconds = sw.seconds();
        return s;
    }();
    return inst;
}

bool eta_bounded_every_iter(const SolverTrace& t, double lambda, int min_dim) {
    const double bound = lambda * std::sqrt(double(min_dim)) + 1e-9;
    for (const auto& r : t.records)
        if (r.eta_norm > bound) return false;
    return true;
}

} // namespace

TEST_CASE("criterion 1: qsvd reconstruction, unitarity and pairing on 200 random matrices") {
    Stopwatch sw;
    Rng rng(1001);
    bool ok = true;
    for (int t = 0; t < 200; ++t) {
        const int m = 1 + int(rng.uniform_int(32));
        const int n = 1 + int(rng.uniform_int(24));
        QMatrix a = t % 5 == 4 ? testsup::random_lowrank(m, n, std::max(1, std::min(m, n) / 2), rng)
                               : testsup::random_qmatrix(m, n, rng);
        const auto f = qsvd(a);
        const double na = std::max(frobenius_norm(a), 1e-300);
        ok &= frobenius_distance(qsvd_reconstruct(f), a) <= 1e-10 * na;
        ok &= unitarity_defect(f.u) <= 1e-10;
        ok &= unitarity_defect(f.v) <= 1e-10;
        const auto adj = complex_svd(complex_adjoint(a));
        for (size_t i = 0; i < f.sigma.size(); ++i) {
            ok &= std::fabs(adj.sigma[2 * i] - f.sigma[i]) <= 1e-9 * std::max(na, 1.0);
            if (2 * i + 1 < adj.sigma.size())
                ok &= std::fabs(adj.sigma[2 * i + 1] - f.sigma[i]) <= 1e-9 * std::max(na, 1.0);
        }
        if (!ok) break;
    }
    const double secs = sw.seconds();
    ok &= secs < 30.0;
    verdict(1, ok, "qsvd property run (200 matrices, tol 1e-10/1e-9, budget 30s)", secs);
    CHECK(ok);
}

TEST_CASE("criterion 2: closed-form shrinkage attains the 1e-3 grid minimum") {
    Stopwatch sw;
    Rng rng(1002);
    const double lambdas[] = {0.5, 1.0, 2.0};
    const double alphas[] = {0.5, 1.0, 2.0, 4.0};
    bool ok = true;
    for (int t = 0; t < 500; ++t) {
        const double lambda = lambdas[t % 3];
        const double alpha = alphas[(t / 3) % 4];
        // draws inside the closed form's validity domain sigma_1 > lambda
        std::array<double, 3> y{};
        y[0] = lambda + 0.2 + rng.uniform() * (6.0 - lambda - 0.2);
        y[1] = rng.uniform() * y[0];
        y[2] = rng.uniform() * y[1];
        const auto x = l1_minus_l2_prox({y[0], y[1], y[2]}, {lambda, alpha});
        const double mine = testsup::l1l2_objective({y.begin(), y.end()}, x, lambda, alpha);
        const double gmin = testsup::grid_min_l1l2(y, lambda, alpha, 1e-3);
        if (!(mine <= gmin + 1e-4)) {
            ok = false;
            break;
        }
    }
    const double secs = sw.seconds();
    ok &= secs < 300.0;
    verdict(2, ok, "500 oracle comparisons vs exact grid minimum (tol 1e-4, budget 5min)", secs);
    CHECK(ok);
}

TEST_CASE("criterion 3: truncated rule obeys its branches on 1000 random spectra") {
    Stopwatch sw;
    Rng rng(1003);
    bool ok = true;
    for (int t = 0; t < 1000 && ok; ++t) {
        const int n = 1 + int(rng.uniform_int(8));
        std::vector<double> s(n);
        for (auto& v : s) v = rng.uniform(0.0, 12.0);
        std::sort(s.rbegin(), s.rend());
        const double lambda = rng.uniform(0.05, 5.0);
        const double alpha = rng.uniform(0.0, 6.0);
        const auto r = qnmf_shrink(s, {lambda, alpha});

        // independent recomputation of the branch rule
        double zn = 0.0;
        for (double v : s) {
            const double z = v > lambda ? v - 0.5 * lambda : 0.0;
            zn += z * z;
        }
        zn = std::sqrt(zn);
        const double k = (alpha == 0.0 || zn == 0.0) ? 1.0 : 1.0 + alpha * lambda / (2.0 * zn);
        const double cutoff =
            k > 1.0 ? k * lambda / (2.0 * (k - 1.0)) : std::numeric_limits<double>::infinity();
        for (int i = 0; i < n; ++i) {
            double expect;
            if (s[i] > cutoff)
                expect = s[i];
            else if (s[i] > lambda)
                expect = std::min(k * (s[i] - 0.5 * lambda), s[i]);
            else
                expect = 0.0;
            ok &= std::fabs(r.sigma_out[i] - expect) <= 1e-12 * std::max(1.0, s[i]);
            ok &= r.sigma_out[i] <= s[i];
            if (i > 0) ok &= r.sigma_out[i] <= r.sigma_out[i - 1];
        }
    }
    const double secs = sw.seconds();
    ok &= secs < 10.0;
    verdict(3, ok, "branch conditions, no amplification, ordering (1000 spectra, budget 10s)",
            secs);
    CHECK(ok);
}

TEST_CASE("criterion 4: von Neumann trace bound on 500 random pairs") {
    Stopwatch sw;
    Rng rng(1004);
    bool ok = true;
    for (int t = 0; t < 500 && ok; ++t) {
        const int m = 2 + int(rng.uniform_int(11));
        const int n = 2 + int(rng.uniform_int(11));
        const QMatrix x = testsup::random_qmatrix(m, n, rng);
        const QMatrix y = testsup::random_qmatrix(m, n, rng);
        const double tr = real_trace(qmat_mul(hermitian_transpose(x), y));
        const auto fx = qsvd(x), fy = qsvd(y);
        double dot = 0.0;
        for (size_t i = 0; i < fx.sigma.size(); ++i) dot += fx.sigma[i] * fy.sigma[i];
        ok &= tr <= dot + 1e-8;
    }
    const double secs = sw.seconds();
    verdict(4, ok, "real_trace(X^H Y) <= <sigma_X, sigma_Y> + 1e-8 (500 pairs)", secs);
    CHECK(ok);
}

TEST_CASE("criterion 5: solver diagnostics on the three synthetic instances") {
    const auto& s = solver_instances();
    bool ok = true;

    const auto rep_d = convergence_report(s.deblur.trace, s.deblur_cfg, 64);
    ok &= rep_d.feas_converged;
    ok &= eta_bounded_every_iter(s.deblur.trace, s.deblur_cfg.lambda, 64);

    const auto rep_m = convergence_report(s.mc.trace, s.mc_cfg, 50);
    ok &= rep_m.feas_converged;
    ok &= eta_bounded_every_iter(s.mc.trace, s.mc_cfg.lambda, 50);

    const auto rep_r = convergence_report(s.rpca.trace, s.rpca_cfg, 50);
    ok &= rep_r.feas_converged;
    ok &= eta_bounded_every_iter(s.rpca.trace, s.rpca_cfg.lambda, 50);

    ok &= s.seconds < 120.0;
    verdict(5, ok,
            "final relative feasibility <= 1e-4 and eta <= lambda*sqrt(M) at every iteration "
            "(deblur 64x64, MC 50x50, RPCA 50x50, budget 2min)",
            s.seconds);
    CHECK(ok);
}

TEST_CASE("criterion 6: exact-recovery desk experiments") {
    Stopwatch sw;
    const auto& s = solver_instances();
    bool ok = true;

    ok &= frobenius_distance(s.mc.x, s.mc_truth) <= 1e-2 * frobenius_norm(s.mc_truth);
    ok &= frobenius_distance(s.rpca.x, s.rpca_truth) <= 1e-2 * frobenius_norm(s.rpca_truth);

    std::set<size_t> truth(s.rpca_corrupted.begin(), s.rpca_corrupted.end());
    size_t tp = 0, fp = 0;
    for (size_t p = 0; p < s.rpca.z.size(); ++p)
        if (s.rpca.z.data()[p].abs() > 1.0) (truth.count(p) ? tp : fp)++;
    const double precision = tp ? double(tp) / double(tp + fp) : 0.0;
    const double recall = double(tp) / double(truth.size());
    const double f1 = 2.0 * precision * recall / (precision + recall + 1e-300);
    ok &= f1 >= 0.95;

    verdict(6, ok, "MC and RPCA recover ground truth to 1e-2; support F1 >= 0.95", sw.seconds());
    CHECK(ok);
}

TEST_CASE("criterion 7: full NSS denoising pipeline at sigma 30") {
    Stopwatch sw;
    const RgbImage card = testsup::textured_card(128, 128);
    const RgbImage noisy = degrade(card, DegradationSpec::noise(30.0), 3).image;
    const auto sched = schedule_lookup(30.0);
    const RgbImage out = nss_denoise(noisy, 30.0, sched);

    const double psnr_noisy = psnr(card, noisy), psnr_out = psnr(card, out);
    const double ssim_noisy = ssim(card, noisy), ssim_out = ssim(card, out);
    const double secs = sw.seconds();
    bool ok = psnr_out >= psnr_noisy + 8.0;
    ok &= ssim_out >= ssim_noisy + 0.15;
    ok &= secs < 180.0;
    char buf[160];
    std::snprintf(buf, sizeof buf, "psnr %.2f -> %.2f (need +8), ssim %.3f -> %.3f (+0.15), budget 3min",
                  psnr_noisy, psnr_out, ssim_noisy, ssim_out);
    verdict(7, ok, buf, secs);
    CHECK(ok);
}

TEST_CASE("criterion 8: conditional Kodak reproduction harness") {
    Stopwatch sw;
    const char* dir = std::getenv("QNMF_KODAK_DIR");
    if (!dir || !fs::is_directory(dir)) {
        verdict(8, true, "SKIPPED: set QNMF_KODAK_DIR to a local Kodak copy to report deltas", 0.0);
        return;
    }
    // reported, never asserted: per-sigma mean PSNR/SSIM deltas vs Table 1
    const struct { double sigma, psnr_ref, ssim_ref; } targets[] = {
        {30.0, 31.16, 0.8525},
        {60.0, 28.06, 0.7564},
    };
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(dir)) {
        const auto ext = e.path().extension().string();
        if (ext == ".png" || ext == ".ppm") files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& t : targets) {
        double mean_psnr = 0.0, mean_ssim = 0.0;
        int count = 0;
        for (const auto& f : files) {
            const RgbImage clean = read_image(f.string());
            const RgbImage noisy =
                degrade(clean, DegradationSpec::noise(t.sigma), 1000 + count).image;
            const RgbImage out = nss_denoise(noisy, t.sigma, schedule_lookup(t.sigma));
            mean_psnr += psnr(clean, out);
            mean_ssim += ssim(clean, out);
            ++count;
        }
        if (count == 0) continue;
        mean_psnr /= count;
        mean_ssim /= count;
        std::printf("[criterion  8]  sigma=%.0f over %d images: psnr %.2f (table %.2f, delta "
                    "%+.2f; target |delta| <= 0.6), ssim %.4f (table %.4f; convention caveat)\n",
                    t.sigma, count, mean_psnr, t.psnr_ref, mean_psnr - t.psnr_ref, mean_ssim,
                    t.ssim_ref);
    }
    verdict(8, true, "reported deltas (not asserted)", sw.seconds());
}

TEST_CASE("criterion 9: NSS-mode completion beats global mode at 80% missing") {
    Stopwatch sw;
    const RgbImage card = testsup::two_tone_card(64, 64);
    const auto deg = degrade(card, DegradationSpec::mask(0.8), 17);

    const RgbImage glob = mc_restore(deg.image, deg.mask, RestoreMode::global,
                                     mc_default_config(RestoreMode::global));
    const RgbImage nss = mc_restore(deg.image, deg.mask, RestoreMode::nss,
                                    mc_default_config(RestoreMode::nss));
    const double p_glob = psnr(card, glob), p_nss = psnr(card, nss);
    const bool ok = p_nss > p_glob;
    char buf[120];
    std::snprintf(buf, sizeof buf, "nss %.2f dB > global %.2f dB on the bundled 64x64 instance",
                  p_nss, p_glob);
    verdict(9, ok, buf, sw.seconds());
    CHECK(ok);
}

TEST_CASE("criterion 10: cli runs are byte-identical given the seed") {
    Stopwatch sw;
    const fs::path dir = fs::temp_directory_path() / ("qnmf_acc_" + std::to_string(::getpid()));
    fs::create_directories(dir);
    auto path = [&](const std::string& n) { return (dir / n).string(); };
    auto run = [&](const std::string& args) {
        const std::string cmd = std::string(QNMF_CLI_PATH) + " " + args + " > /dev/null 2>&1";
        return WEXITSTATUS(std::system(cmd.c_str()));
    };
    auto slurp = [](const std::string& p) {
        std::ifstream is(p, std::ios::binary);
        return std::string{std::istreambuf_iterator<char>(is), {}};
    };

    write_ppm(path("card.ppm"), testsup::two_tone_card(48, 48));
    bool ok = run("synth --noise 30 --seed 11 --in " + path("card.ppm") + " --out " +
                  path("noisy.ppm")) == 0;

    const std::string den = "denoise --sigma 30 --seed 7 --max-iter 2 --in " + path("noisy.ppm");
    ok &= run(den + " --out " + path("d1.png") + " --trace " + path("d1.csv")) == 0;
    ok &= run(den + " --out " + path("d2.png") + " --trace " + path("d2.csv")) == 0;
    ok &= slurp(path("d1.png")) == slurp(path("d2.png"));
    ok &= !slurp(path("d1.png")).empty();
    ok &= slurp(path("d1.csv")) == slurp(path("d2.csv"));

    const std::string mc = "complete --miss 0.6 --mode global --max-iter 100 --seed 3 --in " +
                           path("card.ppm");
    ok &= run(mc + " --out " + path("m1.png")) == 0;
    ok &= run(mc + " --out " + path("m2.png")) == 0;
    ok &= slurp(path("m1.png")) == slurp(path("m2.png"));

    fs::remove_all(dir);
    verdict(10, ok, "repeated denoise and completion runs produce identical bytes", sw.seconds());
    CHECK(ok);
}
