#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "qnmf/patches.hpp"
#include "qnmf/qmatrix.hpp"
#include "qnmf/shrinkage.hpp"

namespace qnmf {

struct AdmmConfig {
    double gamma{1.0};  // fidelity weight
    double lambda{1.0}; // regularizer scale
    double alpha{4.0};  // Frobenius weight inside the regularizer
    double beta0{1.0};  // initial penalty
    double mu{1.05};    // penalty growth, > 1
    double rho{1.0};    // sparse weight (RPCA)
    int max_iter{200};
    double tol{1e-4};   // stop once feasibility and both iterate changes drop below, relative
    ShrinkMode mode{ShrinkMode::truncated};

    void validate() const;
};

struct TraceRecord {
    double feas{0.0};     // relative feasibility residual
    double dx{0.0};       // relative ||X^{k+1} - X^k||
    double dz{0.0};       // relative ||Z^{k+1} - Z^k||
    double eta_norm{0.0}; // absolute ||eta||_F
    double beta{0.0};
    double objective{0.0};
};

struct SolverTrace {
    std::vector<TraceRecord> records;
    double residual_scale{1.0}; // denominator used for the relative residuals

    void write_csv(std::ostream& os) const;
    void write_csv_file(const std::string& path) const;
};

// Degradation operator for the linear inverse problem. Convolutions are
// periodic with a real kernel; custom operators act by left multiplication
// with a square quaternion matrix.
struct LinearOperator {
    enum class Kind { identity, convolution, custom };
    Kind kind{Kind::identity};
    RealMatrix kernel;
    QMatrix matrix;

    static LinearOperator identity_op();
    static LinearOperator convolution_op(RealMatrix k);
    static LinearOperator custom_op(QMatrix m);

    QMatrix apply(const QMatrix& x) const;
    QMatrix apply_adjoint(const QMatrix& x) const;
};

struct Regularizer {
    enum class Kind { global, nss };
    Kind kind{Kind::global};
    PatchGroupSpec spec{};
    // Match groups once on the observation instead of re-matching on the
    // current iterate every iteration.
    bool fixed_groups{false};

    static Regularizer global() { return {}; }
    static Regularizer nss(const PatchGroupSpec& s, bool fixed = false) {
        return {Kind::nss, s, fixed};
    }
};

struct LinearInverseResult {
    QMatrix x;
    SolverTrace trace;
};

// ADMM for min gamma/2 ||A(X) - Y||_F^2 + lambda (||X||_* - alpha ||X||_F).
LinearInverseResult solve_linear_inverse(const QMatrix& y, const LinearOperator& a,
                                         const AdmmConfig& cfg,
                                         const Regularizer& reg = Regularizer::global());

// Closed-form X-update for a real-kernel periodic convolution operator:
// (gamma A^H A + beta I)^{-1} (gamma A^H Y + beta Z - eta), solved per
// component plane in the Fourier domain.
QMatrix x_update_fft(const QMatrix& y, const QMatrix& z, const QMatrix& eta,
                     const RealMatrix& kernel, double gamma, double beta);

struct CompletionResult {
    QMatrix x;
    SolverTrace trace;
};

// ADMM for completion under the mask omega (1 = observed). Y is taken as
// P_Omega(Y); the split residual is Y - X - Z with Z supported on the
// unobserved entries. x0 warm-starts the iterate (default: P_Omega(Y)).
CompletionResult solve_matrix_completion(const QMatrix& y, const RealMatrix& omega,
                                         const AdmmConfig& cfg, const QMatrix* x0 = nullptr);

struct RpcaResult {
    QMatrix x; // low-rank part
    QMatrix z; // sparse part
    SolverTrace trace;
};

RpcaResult solve_rpca(const QMatrix& y, const AdmmConfig& cfg);

struct ConvergenceReport {
    bool eta_bounded{false};    // max_k ||eta^k|| <= lambda*sqrt(min(m,n)) + 1e-9
    bool feas_converged{false}; // final relative feasibility <= tol
    bool dx_converged{false};
    bool dz_converged{false};
    bool beta_geometric{false}; // beta^{k+1} = mu * beta^k throughout
    bool stalled{false};        // feasibility reached while the iterates were still moving
    double eta_max{0.0};
    double eta_bound{0.0};
    double final_feas{0.0};
    double final_dx{0.0};
    double final_dz{0.0};
    double final_objective{0.0};
    int iterations{0};

    bool all_ok() const {
        return eta_bounded && feas_converged && dx_converged && dz_converged && beta_geometric;
    }
};

// Post-hoc diagnostics over a trace; reports, never throws (empty trace is
// rejected as a precondition violation).
ConvergenceReport convergence_report(const SolverTrace& trace, const AdmmConfig& cfg, int min_dim);

} // namespace qnmf
