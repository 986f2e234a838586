#include "qnmf/qsvd.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qnmf {

namespace {

// chi(A) laid out column-major, ready for the Jacobi core.
std::vector<cplx> adjoint_colmajor(const QMatrix& a) {
    const int m = a.rows(), n = a.cols();
    std::vector<cplx> w(size_t(2 * m) * (2 * n));
    const size_t ld = size_t(2 * m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < n; ++j) {
            const Quaternion& q = a(i, j);
            w[ld * j + i]             = {q.w, q.x};   // A1
            w[ld * (n + j) + i]       = {q.y, q.z};   // A2
            w[ld * j + (m + i)]       = {-q.y, q.z};  // -conj(A2)
            w[ld * (n + j) + (m + i)] = {q.w, -q.x};  // conj(A1)
        }
    return w;
}

// Adjoint column (length 2k) back to a quaternion column: v1 + v2*j with
// v1 = top half, v2 = -conj(bottom half).
void pull_back(const cplx* col, int k, Quaternion* out) {
    for (int t = 0; t < k; ++t) {
        const cplx v1 = col[t];
        const cplx v2 = -std::conj(col[k + t]);
        out[t] = {v1.real(), v1.imag(), v2.real(), v2.imag()};
    }
}

Quaternion qcol_dot(const Quaternion* a, const Quaternion* b, int k) {
    Quaternion d{};
    for (int t = 0; t < k; ++t) d += a[t].conj() * b[t];
    return d;
}

double qcol_norm_sq(const Quaternion* a, int k) {
    double s = 0.0;
    for (int t = 0; t < k; ++t) s += a[t].norm_sq();
    return s;
}

// v -= u * <u, v>  (right-module projection; u assumed unit)
void qcol_project_out(const Quaternion* u, Quaternion* v, int k) {
    const Quaternion d = qcol_dot(u, v, k);
    for (int t = 0; t < k; ++t) v[t] -= u[t] * d;
}

void qcol_scale(Quaternion* v, int k, double s) {
    for (int t = 0; t < k; ++t) v[t] *= s;
}

// Greedy MGS completion with standard-basis candidates.
void complete_quaternion_basis(QMatrix& f, int have) {
    const int k = f.rows();
    std::vector<std::vector<Quaternion>> cand(k);
    for (int e = 0; e < k; ++e) {
        cand[e].assign(k, Quaternion{});
        cand[e][e] = Quaternion::real(1.0);
    }
    std::vector<Quaternion> col(k);
    for (int c = 0; c < have; ++c) {
        for (int t = 0; t < k; ++t) col[t] = f(t, c);
        for (int e = 0; e < k; ++e) qcol_project_out(col.data(), cand[e].data(), k);
    }
    for (int c = have; c < k; ++c) {
        int best = -1;
        double best_n = -1.0;
        for (int e = 0; e < k; ++e) {
            const double s = qcol_norm_sq(cand[e].data(), k);
            if (s > best_n) { best_n = s; best = e; }
        }
        const double nn = std::sqrt(best_n);
        for (int t = 0; t < k; ++t) f(t, c) = cand[best][t] * (1.0 / nn);
        for (int t = 0; t < k; ++t) col[t] = f(t, c);
        cand[best].assign(k, Quaternion{});
        for (int e = 0; e < k; ++e) qcol_project_out(col.data(), cand[e].data(), k);
    }
}

void mgs_reorthonormalize(QMatrix& f) {
    const int k = f.rows(), c = f.cols();
    std::vector<Quaternion> prev(k), cur(k);
    int collapsed = -1;
    for (int j = 0; j < c; ++j) {
        for (int t = 0; t < k; ++t) cur[t] = f(t, j);
        for (int p = 0; p < j; ++p) {
            for (int t = 0; t < k; ++t) prev[t] = f(t, p);
            qcol_project_out(prev.data(), cur.data(), k);
        }
        const double nn = std::sqrt(qcol_norm_sq(cur.data(), k));
        if (nn < 1e-8) { collapsed = j; break; }
        for (int t = 0; t < k; ++t) f(t, j) = cur[t] * (1.0 / nn);
    }
    if (collapsed >= 0) complete_quaternion_basis(f, collapsed);
}

// One quaternion column per singular-value pair. Adjoint columns of an
// equal-sigma group are pulled back together and orthonormalized greedily so
// repeated singular values cannot collapse onto one quaternion line.
QMatrix extract_factor(const std::vector<cplx>& j_cols, int k,
                       const std::vector<double>& sigma_q) {
    QMatrix f(k, k);
    const size_t ld = size_t(2 * k);
    const double gap = (sigma_q.empty() ? 0.0 : sigma_q[0]) * 1e-8 + 1e-300;
    int count = 0;
    int i = 0;
    while (i < k) {
        int e = i + 1;
        while (e < k && sigma_q[e - 1] - sigma_q[e] < gap) ++e;
        const int quota = e - i;
        std::vector<std::vector<Quaternion>> cand;
        for (int t = 2 * i; t < std::min(2 * e, 2 * k); ++t) {
            std::vector<Quaternion> qc(k);
            pull_back(j_cols.data() + ld * t, k, qc.data());
            cand.push_back(std::move(qc));
        }
        std::vector<Quaternion> acc(k);
        for (int c = 0; c < count; ++c) {
            for (int t = 0; t < k; ++t) acc[t] = f(t, c);
            for (auto& qc : cand) qcol_project_out(acc.data(), qc.data(), k);
        }
        for (int taken = 0; taken < quota; ++taken) {
            int best = -1;
            double best_n = -1.0;
            for (size_t c = 0; c < cand.size(); ++c) {
                const double s = qcol_norm_sq(cand[c].data(), k);
                if (s > best_n) { best_n = s; best = int(c); }
            }
            if (best < 0 || best_n < 1e-12) break; // fall through to completion
            const double nn = std::sqrt(best_n);
            qcol_scale(cand[best].data(), k, 1.0 / nn);
            for (int t = 0; t < k; ++t) f(t, count) = cand[best][t];
            for (size_t c = 0; c < cand.size(); ++c)
                if (int(c) != best) qcol_project_out(cand[best].data(), cand[c].data(), k);
            cand[best].assign(k, Quaternion{});
            ++count;
        }
        i = e;
    }
    if (count < k) complete_quaternion_basis(f, count);
    return f;
}

std::vector<double> pair_spectrum(const std::vector<double>& dup, int r) {
    std::vector<double> s(r, 0.0);
    for (int i = 0; i < r; ++i) {
        const int a = 2 * i, b = 2 * i + 1;
        if (b < int(dup.size()))
            s[i] = 0.5 * (dup[a] + dup[b]);
        else if (a < int(dup.size()))
            s[i] = dup[a];
    }
    return s;
}

} // namespace

ComplexMatrix complex_adjoint(const QMatrix& a) {
    const int m = a.rows(), n = a.cols();
    ComplexMatrix c(2 * m, 2 * n);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < n; ++j) {
            const Quaternion& q = a(i, j);
            c(i, j)         = {q.w, q.x};
            c(i, n + j)     = {q.y, q.z};
            c(m + i, j)     = {-q.y, q.z};
            c(m + i, n + j) = {q.w, -q.x};
        }
    return c;
}

QSVDFactors qsvd(const QMatrix& a) {
    const int m = a.rows(), n = a.cols();
    const int r = std::min(m, n);
    QSVDFactors out;

    std::vector<cplx> j;
    std::vector<double> dup;
    if (m >= n) {
        std::vector<cplx> w = adjoint_colmajor(a);
        jacobi_orthogonalize(w, 2 * m, 2 * n, j, dup);
        out.sigma = pair_spectrum(dup, r);
        out.v = extract_factor(j, n, out.sigma);

        out.u = QMatrix(m, m);
        const double cut = (out.sigma.empty() ? 0.0 : out.sigma[0]) * 1e-12;
        int have = 0;
        for (int i = 0; i < r && out.sigma[i] > cut; ++i, ++have) {
            // u_i = A * v_i / sigma_i
            for (int p = 0; p < m; ++p) {
                Quaternion s{};
                for (int q = 0; q < n; ++q) s += a(p, q) * out.v(q, i);
                out.u(p, i) = s * (1.0 / out.sigma[i]);
            }
        }
        complete_quaternion_basis(out.u, have);
        mgs_reorthonormalize(out.u);
    } else {
        std::vector<cplx> w = adjoint_colmajor(hermitian_transpose(a));
        jacobi_orthogonalize(w, 2 * n, 2 * m, j, dup);
        out.sigma = pair_spectrum(dup, r);
        out.u = extract_factor(j, m, out.sigma);

        out.v = QMatrix(n, n);
        const double cut = (out.sigma.empty() ? 0.0 : out.sigma[0]) * 1e-12;
        int have = 0;
        for (int i = 0; i < r && out.sigma[i] > cut; ++i, ++have) {
            // v_i = A^H * u_i / sigma_i
            for (int p = 0; p < n; ++p) {
                Quaternion s{};
                for (int q = 0; q < m; ++q) s += a(q, p).conj() * out.u(q, i);
                out.v(p, i) = s * (1.0 / out.sigma[i]);
            }
        }
        complete_quaternion_basis(out.v, have);
        mgs_reorthonormalize(out.v);
    }

    // make the largest-modulus component of each U column real-positive
    for (int c = 0; c < m; ++c) {
        int arg = 0;
        double best = -1.0;
        for (int t = 0; t < m; ++t) {
            const double s = out.u(t, c).norm_sq();
            if (s > best) { best = s; arg = t; }
        }
        if (best <= 0.0) continue;
        const Quaternion e = out.u(arg, c);
        const Quaternion ph = e.conj() * (1.0 / e.abs());
        for (int t = 0; t < m; ++t) out.u(t, c) = out.u(t, c) * ph;
        if (c < r)
            for (int t = 0; t < n; ++t) out.v(t, c) = out.v(t, c) * ph;
    }
    return out;
}

QMatrix qsvd_reconstruct(const QSVDFactors& f) {
    const int m = f.u.rows(), n = f.v.rows();
    const int r = int(f.sigma.size());
    if (f.u.cols() != m || f.v.cols() != n || r > std::min(m, n))
        throw std::invalid_argument("qsvd_reconstruct: inconsistent factor shapes");
    QMatrix x(m, n);
    for (int i = 0; i < r; ++i) {
        if (f.sigma[i] == 0.0) continue;
        for (int p = 0; p < m; ++p) {
            const Quaternion us = f.u(p, i) * f.sigma[i];
            for (int q = 0; q < n; ++q) x(p, q) += us * f.v(q, i).conj();
        }
    }
    return x;
}

SpectrumShrinkOutcome qsvd_shrink_spectrum(const QMatrix& a, const SpectrumMap& fn) {
    const int m = a.rows(), n = a.cols();
    const int r = std::min(m, n);
    SpectrumShrinkOutcome out;

    std::vector<cplx> j;
    std::vector<double> dup;
    const bool tall = m >= n;
    std::vector<cplx> w = tall ? adjoint_colmajor(a) : adjoint_colmajor(hermitian_transpose(a));
    const int wrows = tall ? 2 * m : 2 * n;
    const int wcols = tall ? 2 * n : 2 * m;
    jacobi_orthogonalize(w, wrows, wcols, j, dup);

    out.sigma_in = pair_spectrum(dup, r);
    out.sigma_out = fn(out.sigma_in);
    if (int(out.sigma_out.size()) != r)
        throw std::invalid_argument("qsvd_shrink_spectrum: spectrum map changed length");

    // per adjoint column scale factor sigma_out / column norm
    std::vector<double> ratio(wcols, 0.0);
    for (int t = 0; t < wcols; ++t) {
        const int i = t / 2;
        if (i < r && dup[t] > 0.0 && out.sigma_out[i] > 0.0) ratio[t] = out.sigma_out[i] / dup[t];
    }

    // top half of chi(result):
    //   tall: rows 0..m of  W * diag(ratio) * J^H   (2m x 2n)
    //   wide: rows 0..m of  J * diag(ratio) * W^H   (2m x 2n)
    const int out_cols = 2 * n;
    std::vector<cplx> row(out_cols);
    out.result = QMatrix(m, n);
    const size_t ldw = size_t(wrows);
    const size_t ldj = size_t(wcols);
    for (int i = 0; i < m; ++i) {
        std::fill(row.begin(), row.end(), cplx{});
        for (int t = 0; t < wcols; ++t) {
            if (ratio[t] == 0.0) continue;
            const cplx left = tall ? w[ldw * t + i] : j[ldj * t + i];
            const cplx c = left * ratio[t];
            if (c == cplx{}) continue;
            const cplx* rt = tall ? (j.data() + ldj * t) : (w.data() + ldw * t);
            const double cr = c.real(), ci = c.imag();
            for (int s = 0; s < out_cols; ++s) {
                // c * conj(rt[s])
                const double br = rt[s].real(), bi = rt[s].imag();
                row[s] += cplx{cr * br + ci * bi, ci * br - cr * bi};
            }
        }
        for (int q = 0; q < n; ++q) {
            const cplx x1 = row[q], x2 = row[n + q];
            out.result(i, q) = {x1.real(), x1.imag(), x2.real(), x2.imag()};
        }
    }
    return out;
}

} // namespace qnmf
