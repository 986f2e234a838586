// Batch front end for the restoration library: denoise / deblur / complete /
// rpca tasks plus a `synth` degradation generator. Every run is reproducible
// from (config, seed); restored images and trace CSVs are bit-identical
// across reruns (the JSON sidecar embeds wall-clock time).

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "qnmf/image_io.hpp"
#include "qnmf/imaging.hpp"
#include "qnmf/metrics.hpp"
#include "qnmf/solvers.hpp"

using nlohmann::json;
using namespace qnmf;

namespace {

struct Cli {
    std::string task;
    std::string in_path, out_path, ref_path, mask_path, trace_path, config_path;
    uint64_t seed{0};
    std::string mode{"nss"};
    std::string kernel_spec;
    double sigma{-1.0};
    double miss{-1.0};
    double impulse{-1.0};
    double noise{-1.0};
    std::string blur_spec;

    // solver overrides; NaN = keep the task default
    double lambda{NAN}, alpha{NAN}, beta0{NAN}, mu{NAN}, gamma{NAN}, rho{NAN}, tol{NAN};
    int max_iter{-1};
    int patch{-1}, group{-1}, window{-1}, stride{-1};
};

KernelSpec parse_kernel(const std::string& s) {
    std::vector<std::string> parts;
    size_t start = 0;
    while (start <= s.size()) {
        const size_t colon = s.find(':', start);
        parts.push_back(s.substr(start, colon == std::string::npos ? colon : colon - start));
        if (colon == std::string::npos) break;
        start = colon + 1;
    }
    if (parts.empty()) throw CLI::ValidationError("--kernel", "empty kernel spec");
    const std::string& kind = parts[0];
    try {
        if (kind == "uniform")
            return KernelSpec::uniform(parts.size() > 1 ? std::stoi(parts[1]) : 9);
        if (kind == "gaussian")
            return KernelSpec::gaussian(parts.size() > 1 ? std::stoi(parts[1]) : 25,
                                        parts.size() > 2 ? std::stod(parts[2]) : 1.6);
        if (kind == "motion")
            return KernelSpec::motion(parts.size() > 1 ? std::stoi(parts[1]) : 20,
                                      parts.size() > 2 ? std::stod(parts[2]) : 60.0);
    } catch (const std::exception&) {
        throw CLI::ValidationError("--kernel", "bad kernel parameters: " + s);
    }
    throw CLI::ValidationError("--kernel", "unknown kernel kind: " + kind);
}

// flat key=value config files; CLI flags override
std::vector<std::string> config_file_args(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("config: cannot open " + path);
    std::vector<std::string> args;
    std::string line;
    while (std::getline(is, line)) {
        const auto h = line.find('#');
        if (h != std::string::npos) line.erase(h);
        while (!line.empty() && std::isspace(uint8_t(line.back()))) line.pop_back();
        size_t b = 0;
        while (b < line.size() && std::isspace(uint8_t(line[b]))) ++b;
        line.erase(0, b);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw std::runtime_error("config: expected key=value: " + line);
        args.push_back("--" + line.substr(0, eq) + "=" + line.substr(eq + 1));
    }
    return args;
}

std::string sibling_path(const std::string& path, const std::string& tag) {
    const auto dot = path.find_last_of('.');
    if (dot == std::string::npos) return path + tag;
    return path.substr(0, dot) + tag + path.substr(dot);
}

json config_json(const Cli& c, const AdmmConfig& cfg, const PatchGroupSpec& spec) {
    json j;
    j["task"] = c.task;
    j["in"] = c.in_path;
    j["out"] = c.out_path;
    j["mode"] = c.mode;
    if (!c.ref_path.empty()) j["ref"] = c.ref_path;
    if (!c.mask_path.empty()) j["maskfile"] = c.mask_path;
    if (!c.kernel_spec.empty()) j["kernel"] = c.kernel_spec;
    if (c.sigma >= 0.0) j["sigma"] = c.sigma;
    if (c.miss >= 0.0) j["miss"] = c.miss;
    if (c.impulse >= 0.0) j["impulse"] = c.impulse;
    j["lambda"] = cfg.lambda;
    j["alpha"] = cfg.alpha;
    j["beta0"] = cfg.beta0;
    j["mu"] = cfg.mu;
    j["gamma"] = cfg.gamma;
    j["rho"] = cfg.rho;
    j["max_iter"] = cfg.max_iter;
    j["tol"] = cfg.tol;
    j["patch"] = spec.patch_side;
    j["group"] = spec.group_size;
    j["window"] = spec.search_window;
    j["stride"] = spec.stride;
    return j;
}

void apply_overrides(const Cli& c, AdmmConfig& cfg, PatchGroupSpec& spec) {
    if (!std::isnan(c.lambda)) cfg.lambda = c.lambda;
    if (!std::isnan(c.alpha)) cfg.alpha = c.alpha;
    if (!std::isnan(c.beta0)) cfg.beta0 = c.beta0;
    if (!std::isnan(c.mu)) cfg.mu = c.mu;
    if (!std::isnan(c.gamma)) cfg.gamma = c.gamma;
    if (!std::isnan(c.rho)) cfg.rho = c.rho;
    if (!std::isnan(c.tol)) cfg.tol = c.tol;
    if (c.max_iter > 0) cfg.max_iter = c.max_iter;
    if (c.patch > 0) spec.patch_side = c.patch;
    if (c.group > 0) spec.group_size = c.group;
    if (c.window > 0) spec.search_window = c.window;
    if (c.stride > 0) spec.stride = c.stride;
}

void write_sidecar(const Cli& c, const AdmmConfig& cfg, const PatchGroupSpec& spec,
                   const std::optional<QualityReport>& q, int iters, double runtime_ms) {
    json j;
    j["psnr"] = q ? json(q->psnr) : json(nullptr);
    j["ssim"] = q ? json(q->ssim) : json(nullptr);
    j["config"] = config_json(c, cfg, spec);
    j["seed"] = c.seed;
    j["iters"] = iters;
    j["runtime_ms"] = runtime_ms;
    std::ofstream os(c.out_path + ".json");
    if (!os) throw std::runtime_error("sidecar: cannot open " + c.out_path + ".json");
    os << j.dump(2) << "\n";
}

int run_task(Cli c) {
    const auto t0 = std::chrono::steady_clock::now();
    const RestoreMode mode = c.mode == "global" ? RestoreMode::global : RestoreMode::nss;

    RgbImage input;
    RealMatrix maskfile;
    try {
        input = read_image(c.in_path);
        if (!c.mask_path.empty()) maskfile = read_mask(c.mask_path);
    } catch (const std::exception& e) {
        std::cerr << "I/O error: " << e.what() << "\n";
        return 2;
    }

    RgbImage restored;
    std::optional<QualityReport> q;
    SolverTrace trace;
    AdmmConfig cfg;
    PatchGroupSpec spec;
    int iters = 0;
    const RgbImage* ref = nullptr;
    RgbImage ref_img;
    if (!c.ref_path.empty()) {
        try {
            ref_img = read_image(c.ref_path);
        } catch (const std::exception& e) {
            std::cerr << "I/O error: " << e.what() << "\n";
            return 2;
        }
        ref = &ref_img;
    }

    try {
        if (c.task == "denoise") {
            // blind denoising: fall back to the built-in noise estimator
            const double sigma = c.sigma > 0.0 ? c.sigma : estimate_noise(input);
            if (!(sigma > 0.0)) throw std::invalid_argument("denoise: input looks noise-free; pass --sigma");
            c.sigma = sigma; // echoed in the sidecar
            DenoiseSchedule sched = schedule_lookup(sigma);
            spec = {sched.patch_side, sched.group_size, 30, 4};
            cfg.lambda = sched.lambda;
            cfg.alpha = sched.alpha;
            apply_overrides(c, cfg, spec);
            sched.patch_side = spec.patch_side;
            sched.group_size = spec.group_size;
            sched.lambda = cfg.lambda;
            sched.alpha = cfg.alpha;
            if (c.max_iter > 0) sched.outer_iters = c.max_iter;
            if (mode == RestoreMode::nss) {
                restored = nss_denoise(input, sigma, sched);
                iters = sched.outer_iters;
            } else {
                auto res = solve_linear_inverse(rgb_encode(input), LinearOperator::identity_op(),
                                                cfg, Regularizer::global());
                restored = rgb_decode(res.x);
                iters = int(res.trace.records.size());
                trace = std::move(res.trace);
            }
        } else if (c.task == "deblur") {
            if (c.kernel_spec.empty()) throw std::invalid_argument("deblur: --kernel required");
            const KernelSpec ks = parse_kernel(c.kernel_spec);
            const double sig = c.sigma > 0.0 ? c.sigma : 15.0;
            spec = {6, 155, 30, 4};
            switch (ks.kind) {
                case KernelSpec::Kind::uniform: cfg.beta0 = 8.5; cfg.gamma = 115.0; break;
                case KernelSpec::Kind::gaussian: cfg.beta0 = 7.5; cfg.gamma = 65.0; break;
                case KernelSpec::Kind::motion: cfg.beta0 = 7.5; cfg.gamma = 115.0; break;
            }
            cfg.lambda = schedule_lambda(sig, spec.group_size);
            cfg.alpha = 4.0;
            cfg.mu = 1.05;
            cfg.max_iter = 60;
            apply_overrides(c, cfg, spec);
            const auto reg = mode == RestoreMode::nss ? Regularizer::nss(spec)
                                                      : Regularizer::global();
            auto res = solve_linear_inverse(rgb_encode(input),
                                            LinearOperator::convolution_op(make_kernel(ks)), cfg,
                                            reg);
            restored = rgb_decode(res.x);
            iters = int(res.trace.records.size());
            trace = std::move(res.trace);
        } else if (c.task == "complete") {
            cfg = mc_default_config(mode);
            NssRestoreOptions opt;
            spec = opt.spec;
            apply_overrides(c, cfg, spec);
            opt.spec = spec;
            RealMatrix omega;
            RgbImage obs;
            if (!c.mask_path.empty()) {
                omega = maskfile;
                obs = input;
            } else if (c.miss >= 0.0) {
                auto deg = degrade(input, DegradationSpec::mask(c.miss), c.seed);
                omega = std::move(deg.mask);
                obs = std::move(deg.image);
                ref = &input; // self-degraded: the input is the ground truth
            } else {
                throw std::invalid_argument("complete: --miss or --maskfile required");
            }
            restored = mc_restore(obs, omega, mode, cfg, opt, &trace);
            iters = mode == RestoreMode::global ? int(trace.records.size()) : opt.outer_rounds;
        } else if (c.task == "rpca") {
            cfg = rpca_default_config(mode, input.height, input.width);
            NssRestoreOptions opt;
            spec = opt.spec;
            apply_overrides(c, cfg, spec);
            opt.spec = spec;
            RgbImage obs = input;
            if (c.impulse >= 0.0) {
                obs = degrade(input, DegradationSpec::impulse(c.impulse), c.seed).image;
                ref = &input;
            }
            auto res = rpca_restore(obs, mode, cfg, opt, &trace);
            restored = std::move(res.image);
            iters = mode == RestoreMode::global ? int(trace.records.size()) : opt.outer_rounds;
        } else {
            throw std::invalid_argument("unknown task: " + c.task);
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const std::runtime_error& e) {
        std::cerr << "solver error: " << e.what() << "\n";
        return 3;
    }

    if (ref) q = quality(*ref, restored);
    const double runtime_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();

    try {
        write_image(c.out_path, restored);
        if (!c.trace_path.empty()) trace.write_csv_file(c.trace_path);
        write_sidecar(c, cfg, spec, q, iters, runtime_ms);
    } catch (const std::exception& e) {
        std::cerr << "I/O error: " << e.what() << "\n";
        return 2;
    }
    if (q) std::printf("psnr=%.4f ssim=%.4f iters=%d\n", q->psnr, q->ssim, iters);
    return 0;
}

int run_synth(const Cli& c) {
    RgbImage input;
    try {
        input = read_image(c.in_path);
    } catch (const std::exception& e) {
        std::cerr << "I/O error: " << e.what() << "\n";
        return 2;
    }

    DegradationSpec spec;
    try {
        if (c.noise >= 0.0)
            spec = DegradationSpec::noise(c.noise);
        else if (c.miss >= 0.0)
            spec = DegradationSpec::mask(c.miss);
        else if (c.impulse >= 0.0)
            spec = DegradationSpec::impulse(c.impulse);
        else if (!c.blur_spec.empty())
            spec = DegradationSpec::blur(parse_kernel(c.blur_spec), c.sigma > 0.0 ? c.sigma : 0.0);
        else
            throw std::invalid_argument("synth: one of --noise/--mask/--impulse/--blur required");
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    }

    try {
        const Degraded deg = degrade(input, spec, c.seed);
        write_image(c.out_path, deg.image);
        write_image(sibling_path(c.out_path, ".gt"), input);
        if (spec.kind == DegradationSpec::Kind::mask) {
            const auto dot = c.out_path.find_last_of('.');
            const std::string stem = dot == std::string::npos ? c.out_path : c.out_path.substr(0, dot);
            const std::string ext = c.out_path.size() > dot && c.out_path.substr(dot) == ".ppm"
                                        ? ".pgm"
                                        : ".png";
            write_mask(stem + ".mask" + ext, deg.mask);
        }
    } catch (const std::exception& e) {
        std::cerr << "I/O error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"QNMF color image restoration"};
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

    Cli c;
    std::string task_pos, task_flag;
    app.add_option("TASK", task_pos, "denoise | deblur | complete | rpca | synth");
    app.add_option("--task", task_flag, "task name (alternative to the positional)");
    app.add_option("--in", c.in_path, "input image (png/ppm)")->required();
    app.add_option("--out", c.out_path, "output image (png/ppm)")->required();
    app.add_option("--ref", c.ref_path, "ground-truth image for metrics");
    app.add_option("--maskfile", c.mask_path, "observation mask (0 = missing)");
    app.add_option("--trace", c.trace_path, "solver trace CSV path");
    app.add_option("--config", c.config_path, "flat key=value config file");
    app.add_option("--seed", c.seed, "rng seed");
    app.add_option("--mode", c.mode, "global | nss")->check(CLI::IsMember({"global", "nss"}));
    app.add_option("--sigma", c.sigma, "noise level (0-255 scale)");
    app.add_option("--kernel", c.kernel_spec, "uniform:9 | gaussian:25:1.6 | motion:20:60");
    app.add_option("--miss", c.miss, "missing-pixel rate for completion");
    app.add_option("--impulse", c.impulse, "impulse corruption rate");
    app.add_option("--noise", c.noise, "synth: gaussian noise sigma");
    app.add_option("--mask", c.miss, "synth: miss rate (alias of --miss)");
    app.add_option("--blur", c.blur_spec, "synth: blur kernel spec");
    app.add_option("--lambda", c.lambda, "regularizer scale");
    app.add_option("--alpha", c.alpha, "Frobenius weight");
    app.add_option("--beta0", c.beta0, "initial penalty");
    app.add_option("--mu", c.mu, "penalty growth (> 1)");
    app.add_option("--gamma", c.gamma, "fidelity weight");
    app.add_option("--rho", c.rho, "sparse weight (rpca)");
    app.add_option("--max-iter", c.max_iter, "iteration cap");
    app.add_option("--tol", c.tol, "relative feasibility stop");
    app.add_option("--patch", c.patch, "patch side");
    app.add_option("--group", c.group, "group size");
    app.add_option("--window", c.window, "search window");
    app.add_option("--stride", c.stride, "reference-patch stride");

    // config file values act as defaults under the CLI flags
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    for (size_t i = 0; i < args.size(); ++i) {
        std::string path;
        if (args[i] == "--config" && i + 1 < args.size())
            path = args[i + 1];
        else if (args[i].rfind("--config=", 0) == 0)
            path = args[i].substr(9);
        if (!path.empty()) {
            try {
                const auto extra = config_file_args(path);
                args.insert(args.begin(), extra.begin(), extra.end());
            } catch (const std::exception& e) {
                std::cerr << "config error: " << e.what() << "\n";
                return 1;
            }
            break;
        }
    }
    std::reverse(args.begin(), args.end()); // CLI11 parses reversed vectors
    try {
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        std::cerr << (e.get_exit_code() == 0 ? "" : "config error: ");
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    c.task = !task_flag.empty() ? task_flag : task_pos;
    if (c.task.empty()) {
        std::cerr << "config error: no task given\n";
        return 1;
    }
    return c.task == "synth" ? run_synth(c) : run_task(c);
}
