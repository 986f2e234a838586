#include "qnmf/complex_svd.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace qnmf {

namespace {

constexpr double kOffDiagTol = 1e-13;
constexpr int kMaxSweeps = 30;

// dot = sum conj(a_k) * b_k over interleaved (re,im) pairs
inline cplx col_dot(const double* a, const double* b, int n) {
    double re = 0.0, im = 0.0;
    for (int k = 0; k < n; ++k) {
        const double ar = a[2 * k], ai = a[2 * k + 1];
        const double br = b[2 * k], bi = b[2 * k + 1];
        re += ar * br + ai * bi;
        im += ar * bi - ai * br;
    }
    return {re, im};
}

// [a, b] <- [c*a - conj(s)*b, s*a + c*b]
inline void rotate_cols(double* a, double* b, int n, double c, double sr, double si) {
    for (int k = 0; k < n; ++k) {
        const double ar = a[2 * k], ai = a[2 * k + 1];
        const double br = b[2 * k], bi = b[2 * k + 1];
        a[2 * k]     = c * ar - (sr * br + si * bi);
        a[2 * k + 1] = c * ai - (sr * bi - si * br);
        b[2 * k]     = (sr * ar - si * ai) + c * br;
        b[2 * k + 1] = (sr * ai + si * ar) + c * bi;
    }
}

inline double col_norm_sq(const double* a, int n) {
    double s = 0.0;
    for (int k = 0; k < 2 * n; ++k) s += a[k] * a[k];
    return s;
}

} // namespace

void jacobi_orthogonalize(std::vector<cplx>& w, int rows, int cols,
                          std::vector<cplx>& j, std::vector<double>& sigma) {
    j.assign(size_t(cols) * cols, cplx{0.0, 0.0});
    for (int i = 0; i < cols; ++i) j[size_t(i) * cols + i] = cplx{1.0, 0.0};

    double* wp = reinterpret_cast<double*>(w.data());
    double* jp = reinterpret_cast<double*>(j.data());

    std::vector<double> nsq(cols);
    bool converged = (cols <= 1);
    int sweep = 0;
    while (!converged) {
        if (sweep++ >= kMaxSweeps)
            throw std::runtime_error("complex_svd: Jacobi failed to converge within sweep cap");
        // exact norms at sweep start; incremental updates inside
        double nsq_max = 0.0;
        for (int i = 0; i < cols; ++i) {
            nsq[i] = col_norm_sq(wp + size_t(2 * rows) * i, rows);
            nsq_max = std::max(nsq_max, nsq[i]);
        }
        // columns at cancellation noise level cannot be resolved further and
        // would chase the relative criterion forever
        const double floor = nsq_max * 1e-24;
        converged = true;
        for (int p = 0; p < cols - 1; ++p) {
            double* wi = wp + size_t(2 * rows) * p;
            for (int q = p + 1; q < cols; ++q) {
                double* wj = wp + size_t(2 * rows) * q;
                const double aii = nsq[p], ajj = nsq[q];
                if (aii <= floor || ajj <= floor) continue;
                const cplx g = col_dot(wi, wj, rows);
                const double gm2 = std::norm(g);
                if (gm2 <= kOffDiagTol * kOffDiagTol * aii * ajj) continue;
                converged = false;
                const double gm = std::sqrt(gm2);
                const double tau = (aii - ajj) / (2.0 * gm);
                const double t = (tau >= 0.0) ? -1.0 / (tau + std::sqrt(1.0 + tau * tau))
                                              : 1.0 / (-tau + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double sr = t * c * (g.real() / gm);
                const double si = t * c * (g.imag() / gm);
                rotate_cols(wi, wj, rows, c, sr, si);
                rotate_cols(jp + size_t(2 * cols) * p, jp + size_t(2 * cols) * q, cols, c, sr, si);
                const double c2 = c * c;
                nsq[p] = std::max(c2 * (aii + t * t * ajj - 2.0 * t * gm), 0.0);
                nsq[q] = std::max(c2 * (t * t * aii + ajj + 2.0 * t * gm), 0.0);
            }
        }
    }

    sigma.resize(cols);
    for (int i = 0; i < cols; ++i)
        sigma[i] = std::sqrt(col_norm_sq(wp + size_t(2 * rows) * i, rows));

    std::vector<int> order(cols);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return sigma[a] > sigma[b]; });

    std::vector<cplx> wtmp(w), jtmp(j);
    std::vector<double> stmp(sigma);
    for (int i = 0; i < cols; ++i) {
        const int src = order[i];
        sigma[i] = stmp[src];
        std::copy_n(wtmp.begin() + size_t(rows) * src, rows, w.begin() + size_t(rows) * i);
        std::copy_n(jtmp.begin() + size_t(cols) * src, cols, j.begin() + size_t(cols) * i);
    }
}

ComplexMatrix cmat_mul(const ComplexMatrix& x, const ComplexMatrix& y) {
    if (x.cols != y.rows) throw std::invalid_argument("cmat_mul: inner dimensions differ");
    ComplexMatrix r(x.rows, y.cols);
    for (int i = 0; i < x.rows; ++i)
        for (int k = 0; k < x.cols; ++k) {
            const cplx xik = x(i, k);
            if (xik == cplx{}) continue;
            for (int jx = 0; jx < y.cols; ++jx) r(i, jx) += xik * y(k, jx);
        }
    return r;
}

ComplexMatrix cmat_hermitian(const ComplexMatrix& x) {
    ComplexMatrix r(x.cols, x.rows);
    for (int i = 0; i < x.rows; ++i)
        for (int jx = 0; jx < x.cols; ++jx) r(jx, i) = std::conj(x(i, jx));
    return r;
}

namespace {

// Modified Gram-Schmidt completion of a partially filled unitary basis
// (column-major, n x n, `have` columns present). Candidates are standard
// basis vectors, picked greedily by residual norm.
void complete_complex_basis(std::vector<cplx>& u, int n, int have) {
    std::vector<std::vector<cplx>> cand(n);
    for (int e = 0; e < n; ++e) {
        cand[e].assign(n, cplx{});
        cand[e][e] = cplx{1.0, 0.0};
        for (int c = 0; c < have; ++c) {
            const cplx* col = u.data() + size_t(n) * c;
            cplx d{};
            for (int k = 0; k < n; ++k) d += std::conj(col[k]) * cand[e][k];
            for (int k = 0; k < n; ++k) cand[e][k] -= d * col[k];
        }
    }
    for (int c = have; c < n; ++c) {
        int best = -1;
        double best_n = -1.0;
        for (int e = 0; e < n; ++e) {
            double s = 0.0;
            for (int k = 0; k < n; ++k) s += std::norm(cand[e][k]);
            if (s > best_n) { best_n = s; best = e; }
        }
        const double nn = std::sqrt(best_n);
        cplx* col = u.data() + size_t(n) * c;
        for (int k = 0; k < n; ++k) col[k] = cand[best][k] / nn;
        cand[best].assign(n, cplx{});
        for (int e = 0; e < n; ++e) {
            cplx d{};
            for (int k = 0; k < n; ++k) d += std::conj(col[k]) * cand[e][k];
            for (int k = 0; k < n; ++k) cand[e][k] -= d * col[k];
        }
    }
}

} // namespace

ComplexSvd complex_svd(const ComplexMatrix& m) {
    const bool transposed = m.rows < m.cols;
    const int rows = transposed ? m.cols : m.rows;
    const int cols = transposed ? m.rows : m.cols;

    // gather into column-major work buffer, conjugate-transposing if wide
    std::vector<cplx> w(size_t(rows) * cols);
    for (int i = 0; i < m.rows; ++i)
        for (int jx = 0; jx < m.cols; ++jx) {
            const cplx val = m(i, jx);
            if (!transposed)
                w[size_t(rows) * jx + i] = val;
            else
                w[size_t(rows) * i + jx] = std::conj(val);
        }

    std::vector<cplx> j;
    std::vector<double> sigma;
    jacobi_orthogonalize(w, rows, cols, j, sigma);

    const double cutoff = sigma.empty() ? 0.0 : sigma[0] * 1e-15 * rows;
    std::vector<cplx> left(size_t(rows) * rows, cplx{});
    int have = 0;
    for (int c = 0; c < cols; ++c) {
        if (sigma[c] <= cutoff) break;
        for (int k = 0; k < rows; ++k)
            left[size_t(rows) * c + k] = w[size_t(rows) * c + k] / sigma[c];
        ++have;
    }
    complete_complex_basis(left, rows, have);

    ComplexSvd out;
    out.sigma = sigma;

    // left is rows x rows, j is cols x cols (both column-major)
    ComplexMatrix big(rows, rows), small(cols, cols);
    for (int c = 0; c < rows; ++c)
        for (int k = 0; k < rows; ++k) big(k, c) = left[size_t(rows) * c + k];
    for (int c = 0; c < cols; ++c)
        for (int k = 0; k < cols; ++k) small(k, c) = j[size_t(cols) * c + k];

    if (!transposed) {
        out.u = std::move(big);
        out.v = std::move(small);
    } else {
        // m^H = big * diag(sigma) * small^H  =>  m = small * diag(sigma) * big^H
        out.u = std::move(small);
        out.v = std::move(big);
    }
    return out;
}

} // namespace qnmf
