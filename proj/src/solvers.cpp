#include "qnmf/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>
#include <stdexcept>

#include "qnmf/fft.hpp"
#include "qnmf/thread_pool.hpp"

namespace qnmf {

void AdmmConfig::validate() const {
    if (!(lambda > 0.0)) throw std::invalid_argument("AdmmConfig: lambda must be > 0");
    if (!(alpha >= 0.0)) throw std::invalid_argument("AdmmConfig: alpha must be >= 0");
    if (!(beta0 > 0.0)) throw std::invalid_argument("AdmmConfig: beta0 must be > 0");
    if (!(mu > 1.0)) throw std::invalid_argument("AdmmConfig: mu must be > 1");
    if (max_iter < 1) throw std::invalid_argument("AdmmConfig: max_iter must be >= 1");
    if (!(tol >= 0.0)) throw std::invalid_argument("AdmmConfig: tol must be >= 0");
}

void SolverTrace::write_csv(std::ostream& os) const {
    os << "iter,feas_residual,dx,dz,eta_norm,beta,objective\n";
    os.precision(17);
    for (size_t k = 0; k < records.size(); ++k) {
        const auto& r = records[k];
        os << k << ',' << r.feas << ',' << r.dx << ',' << r.dz << ',' << r.eta_norm << ','
           << r.beta << ',' << r.objective << '\n';
    }
}

void SolverTrace::write_csv_file(const std::string& path) const {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("SolverTrace: cannot open " + path);
    write_csv(os);
}

LinearOperator LinearOperator::identity_op() { return {}; }

LinearOperator LinearOperator::convolution_op(RealMatrix k) {
    LinearOperator a;
    a.kind = Kind::convolution;
    a.kernel = std::move(k);
    return a;
}

LinearOperator LinearOperator::custom_op(QMatrix m) {
    if (m.rows() != m.cols()) throw std::invalid_argument("LinearOperator: custom matrix not square");
    LinearOperator a;
    a.kind = Kind::custom;
    a.matrix = std::move(m);
    return a;
}

QMatrix LinearOperator::apply(const QMatrix& x) const {
    switch (kind) {
        case Kind::identity: return x;
        case Kind::convolution: return convolve_periodic(x, kernel);
        case Kind::custom: return qmat_mul(matrix, x);
    }
    throw std::logic_error("LinearOperator: bad kind");
}

QMatrix LinearOperator::apply_adjoint(const QMatrix& x) const {
    switch (kind) {
        case Kind::identity: return x;
        case Kind::convolution: {
            // adjoint of periodic convolution = convolution with the flipped kernel
            RealMatrix flip(kernel.rows, kernel.cols);
            for (int i = 0; i < kernel.rows; ++i)
                for (int j = 0; j < kernel.cols; ++j)
                    flip(i, j) = kernel(kernel.rows - 1 - i, kernel.cols - 1 - j);
            // the flip moves the anchor when dimensions are even
            QMatrix y = convolve_periodic(x, flip);
            const int sr = (kernel.rows % 2 == 0) ? 1 : 0;
            const int sc = (kernel.cols % 2 == 0) ? 1 : 0;
            if (sr == 0 && sc == 0) return y;
            QMatrix shifted(y.rows(), y.cols());
            for (int i = 0; i < y.rows(); ++i)
                for (int j = 0; j < y.cols(); ++j)
                    shifted(i, j) = y((i + sr) % y.rows(), (j + sc) % y.cols());
            return shifted;
        }
        case Kind::custom: return qmat_mul(hermitian_transpose(matrix), x);
    }
    throw std::logic_error("LinearOperator: bad kind");
}

QMatrix x_update_fft(const QMatrix& y, const QMatrix& z, const QMatrix& eta,
                     const RealMatrix& kernel, double gamma, double beta) {
    if (!(beta > 0.0)) throw std::invalid_argument("x_update_fft: beta must be > 0");
    const Spectrum kf = fft2_r2c(pad_kernel_centered(kernel, y.rows(), y.cols()));
    QMatrix x(y.rows(), y.cols());
    for (int c = 0; c < 4; ++c) {
        Spectrum yf = fft2_r2c(component_plane(y, c));
        Spectrum zf = fft2_r2c(component_plane(z, c));
        Spectrum ef = fft2_r2c(component_plane(eta, c));
        for (size_t t = 0; t < yf.a.size(); ++t) {
            const auto h = kf.a[t];
            const double denom = gamma * std::norm(h) + beta;
            yf.a[t] = (gamma * std::conj(h) * yf.a[t] + beta * zf.a[t] - ef.a[t]) / denom;
        }
        set_component_plane(x, c, fft2_c2r(yf));
    }
    return x;
}

namespace {

double real_dot(const QMatrix& a, const QMatrix& b) {
    double s = 0.0;
    for (size_t i = 0; i < a.size(); ++i) {
        const Quaternion &p = a.data()[i], &q = b.data()[i];
        s += p.w * q.w + p.x * q.x + p.y * q.y + p.z * q.z;
    }
    return s;
}

// CG on the normal equations (gamma A^H A + beta I) X = B; the operator is
// Hermitian positive definite under the real inner product Re tr(P^H Q).
QMatrix solve_custom_cg(const LinearOperator& a, const QMatrix& y, const QMatrix& z,
                        const QMatrix& eta, double gamma, double beta, const QMatrix& x0) {
    auto op = [&](const QMatrix& p) {
        QMatrix r = a.apply_adjoint(a.apply(p)) * gamma;
        r += p * beta;
        return r;
    };
    QMatrix b = a.apply_adjoint(y) * gamma;
    b += z * beta;
    b -= eta;
    const double bnorm = frobenius_norm(b);
    if (bnorm == 0.0) return QMatrix(y.rows(), y.cols());

    QMatrix x = x0;
    QMatrix r = b - op(x);
    QMatrix p = r;
    double rs = real_dot(r, r);
    const double stop = 1e-10 * bnorm;
    const int cap = 4 * int(x.size()) + 50;
    for (int it = 0; it < cap && std::sqrt(rs) > stop; ++it) {
        const QMatrix mp = op(p);
        const double al = rs / real_dot(p, mp);
        x += p * al;
        r -= mp * al;
        const double rs_new = real_dot(r, r);
        p = r + p * (rs_new / rs);
        rs = rs_new;
    }
    return x;
}

struct GroupOutcome {
    std::vector<PatchPos> positions;
    QMatrix denoised;
    double reg_value{0.0}; // ||G||_* - alpha ||G||_F of the shrunk group
};

// Patchwise Z-update: block match, shrink every group spectrum, aggregate.
QMatrix nss_shrink(const QMatrix& target, const QMatrix& match_img, const Regularizer& reg,
                   const ShrinkParams& sp, ShrinkMode mode, double* reg_value_out) {
    const auto refs =
        reference_positions(target.rows(), target.cols(), reg.spec.patch_side, reg.spec.stride);
    GroupAggregator agg(target.rows(), target.cols());
    double reg_total = 0.0;
    chunked_parallel_map<GroupOutcome>(
        refs.size(), 512,
        [&](size_t i) {
            GroupOutcome g;
            g.positions = block_match(match_img, refs[i], reg.spec);
            const QMatrix grp = extract_group(target, g.positions, reg.spec.patch_side);
            auto out = qnmf_denoise_spectrum(grp, sp, mode);
            g.denoised = std::move(out.result);
            double nuc = 0.0, fro2 = 0.0;
            for (double s : out.sigma_out) {
                nuc += s;
                fro2 += s * s;
            }
            g.reg_value = nuc - sp.alpha * std::sqrt(fro2);
            return g;
        },
        [&](size_t, GroupOutcome& g) {
            agg.add(g.denoised, g.positions, reg.spec.patch_side);
            reg_total += g.reg_value;
        });
    if (reg_value_out) *reg_value_out = reg_total;
    return agg.finalize(target);
}

void ensure_finite(const QMatrix& x, const char* who) {
    if (!x.all_finite()) throw std::runtime_error(std::string(who) + ": iterate diverged");
}

} // namespace

LinearInverseResult solve_linear_inverse(const QMatrix& y, const LinearOperator& a,
                                         const AdmmConfig& cfg, const Regularizer& reg) {
    cfg.validate();
    if (!(cfg.gamma > 0.0)) throw std::invalid_argument("solve_linear_inverse: gamma must be > 0");
    if (a.kind == LinearOperator::Kind::custom && a.matrix.rows() != y.rows())
        throw std::invalid_argument("solve_linear_inverse: operator/observation shape mismatch");

    LinearInverseResult out;
    double den = frobenius_norm(y);
    if (den == 0.0) den = 1.0;
    out.trace.residual_scale = den;

    QMatrix x = y, z = x, eta(y.rows(), y.cols());
    double beta = cfg.beta0;
    for (int k = 0; k < cfg.max_iter; ++k) {
        QMatrix x_new;
        switch (a.kind) {
            case LinearOperator::Kind::identity: {
                x_new = (y * cfg.gamma + z * beta - eta) * (1.0 / (cfg.gamma + beta));
                break;
            }
            case LinearOperator::Kind::convolution:
                x_new = x_update_fft(y, z, eta, a.kernel, cfg.gamma, beta);
                break;
            case LinearOperator::Kind::custom:
                x_new = solve_custom_cg(a, y, z, eta, cfg.gamma, beta, x);
                break;
        }

        const ShrinkParams sp{cfg.lambda / beta, cfg.alpha};
        QMatrix z_new;
        double reg_value = 0.0;
        if (reg.kind == Regularizer::Kind::global) {
            auto shrunk = qnmf_denoise_spectrum(x_new + eta * (1.0 / beta), sp, cfg.mode);
            z_new = std::move(shrunk.result);
            double nuc = 0.0, fro2 = 0.0;
            for (double s : shrunk.sigma_out) {
                nuc += s;
                fro2 += s * s;
            }
            reg_value = nuc - cfg.alpha * std::sqrt(fro2);
        } else {
            const QMatrix target = x_new + eta * (1.0 / beta);
            z_new = nss_shrink(target, reg.fixed_groups ? y : x_new, reg, sp, cfg.mode, &reg_value);
        }

        const QMatrix gap = x_new - z_new;
        const double feas = frobenius_norm(gap);
        eta += gap * beta;

        TraceRecord rec;
        rec.feas = feas / den;
        rec.dx = frobenius_distance(x_new, x) / den;
        rec.dz = frobenius_distance(z_new, z) / den;
        rec.eta_norm = frobenius_norm(eta);
        rec.beta = beta;
        const double fid = frobenius_distance(a.apply(x_new), y);
        rec.objective = 0.5 * cfg.gamma * fid * fid + cfg.lambda * reg_value;
        out.trace.records.push_back(rec);

        x = std::move(x_new);
        z = std::move(z_new);
        ensure_finite(x, "solve_linear_inverse");
        beta *= cfg.mu;
        if (rec.feas <= cfg.tol && rec.dx <= cfg.tol && rec.dz <= cfg.tol) break;
    }
    out.x = std::move(x);
    return out;
}

CompletionResult solve_matrix_completion(const QMatrix& y_in, const RealMatrix& omega,
                                         const AdmmConfig& cfg, const QMatrix* x0) {
    cfg.validate();
    if (y_in.rows() != omega.rows || y_in.cols() != omega.cols)
        throw std::invalid_argument("solve_matrix_completion: mask shape mismatch");
    bool any = false;
    for (double v : omega.v)
        if (v != 0.0) { any = true; break; }
    if (!any) throw std::invalid_argument("solve_matrix_completion: empty mask");

    const QMatrix y = hadamard(y_in, omega); // observations, zero off the mask
    CompletionResult out;
    double den = frobenius_norm(y);
    if (den == 0.0) den = 1.0;
    out.trace.residual_scale = den;

    QMatrix x = x0 ? *x0 : y, z(y.rows(), y.cols()), eta(y.rows(), y.cols());
    if (x0 && (x0->rows() != y.rows() || x0->cols() != y.cols()))
        throw std::invalid_argument("solve_matrix_completion: x0 shape mismatch");
    double beta = cfg.beta0;
    for (int k = 0; k < cfg.max_iter; ++k) {
        // Z: unconstrained residual on the unobserved entries, zero on omega
        QMatrix z_new(y.rows(), y.cols());
        for (int i = 0; i < y.rows(); ++i)
            for (int j = 0; j < y.cols(); ++j)
                if (omega(i, j) == 0.0)
                    z_new(i, j) = y(i, j) - x(i, j) + eta(i, j) * (1.0 / beta);

        auto shrunk =
            qnmf_denoise_spectrum(y - z_new + eta * (1.0 / beta), {cfg.lambda / beta, cfg.alpha},
                                  cfg.mode);
        QMatrix x_new = std::move(shrunk.result);

        const QMatrix gap = y - x_new - z_new;
        const double feas = frobenius_norm(gap);
        eta += gap * beta;

        TraceRecord rec;
        rec.feas = feas / den;
        rec.dx = frobenius_distance(x_new, x) / den;
        rec.dz = frobenius_distance(z_new, z) / den;
        rec.eta_norm = frobenius_norm(eta);
        rec.beta = beta;
        double nuc = 0.0, fro2 = 0.0;
        for (double s : shrunk.sigma_out) {
            nuc += s;
            fro2 += s * s;
        }
        rec.objective = cfg.lambda * (nuc - cfg.alpha * std::sqrt(fro2));
        out.trace.records.push_back(rec);

        x = std::move(x_new);
        z = std::move(z_new);
        ensure_finite(x, "solve_matrix_completion");
        beta *= cfg.mu;
        if (rec.feas <= cfg.tol && rec.dx <= cfg.tol && rec.dz <= cfg.tol) break;
    }
    out.x = std::move(x);
    return out;
}

RpcaResult solve_rpca(const QMatrix& y, const AdmmConfig& cfg) {
    cfg.validate();
    if (!(cfg.rho > 0.0)) throw std::invalid_argument("solve_rpca: rho must be > 0");

    RpcaResult out;
    double den = frobenius_norm(y);
    if (den == 0.0) den = 1.0;
    out.trace.residual_scale = den;

    QMatrix x = y, z(y.rows(), y.cols()), eta(y.rows(), y.cols());
    double beta = cfg.beta0;
    for (int k = 0; k < cfg.max_iter; ++k) {
        QMatrix z_new = soft_threshold_quat(y - x + eta * (1.0 / beta), cfg.rho / beta);
        auto shrunk =
            qnmf_denoise_spectrum(y - z_new + eta * (1.0 / beta), {cfg.lambda / beta, cfg.alpha},
                                  cfg.mode);
        QMatrix x_new = std::move(shrunk.result);

        const QMatrix gap = y - x_new - z_new;
        const double feas = frobenius_norm(gap);
        eta += gap * beta;

        TraceRecord rec;
        rec.feas = feas / den;
        rec.dx = frobenius_distance(x_new, x) / den;
        rec.dz = frobenius_distance(z_new, z) / den;
        rec.eta_norm = frobenius_norm(eta);
        rec.beta = beta;
        double nuc = 0.0, fro2 = 0.0;
        for (double s : shrunk.sigma_out) {
            nuc += s;
            fro2 += s * s;
        }
        rec.objective = cfg.lambda * (nuc - cfg.alpha * std::sqrt(fro2)) + cfg.rho * l1_norm(z_new);
        out.trace.records.push_back(rec);

        x = std::move(x_new);
        z = std::move(z_new);
        ensure_finite(x, "solve_rpca");
        beta *= cfg.mu;
        if (rec.feas <= cfg.tol && rec.dx <= cfg.tol && rec.dz <= cfg.tol) break;
    }
    out.x = std::move(x);
    out.z = std::move(z);
    return out;
}

ConvergenceReport convergence_report(const SolverTrace& trace, const AdmmConfig& cfg,
                                     int min_dim) {
    if (trace.records.empty())
        throw std::invalid_argument("convergence_report: empty trace");
    ConvergenceReport rep;
    rep.iterations = int(trace.records.size());
    rep.eta_bound = cfg.lambda * std::sqrt(double(min_dim));
    for (const auto& r : trace.records) rep.eta_max = std::max(rep.eta_max, r.eta_norm);
    rep.eta_bounded = rep.eta_max <= rep.eta_bound + 1e-9;

    const auto& last = trace.records.back();
    rep.final_feas = last.feas;
    rep.final_dx = last.dx;
    rep.final_dz = last.dz;
    rep.final_objective = last.objective;
    rep.feas_converged = last.feas <= cfg.tol;
    rep.dx_converged = last.dx <= cfg.tol;
    rep.dz_converged = last.dz <= cfg.tol;

    rep.beta_geometric = true;
    for (size_t k = 1; k < trace.records.size(); ++k) {
        const double expect = trace.records[k - 1].beta * cfg.mu;
        if (std::fabs(trace.records[k].beta - expect) > 1e-9 * expect) {
            rep.beta_geometric = false;
            break;
        }
    }

    // feasibility forced by the penalty while the iterates were still moving
    rep.stalled = rep.feas_converged && (!rep.dx_converged || !rep.dz_converged);
    return rep;
}

} // namespace qnmf
