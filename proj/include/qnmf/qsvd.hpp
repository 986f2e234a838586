#pragma once

#include <functional>
#include <vector>

#include "qnmf/complex_svd.hpp"
#include "qnmf/qmatrix.hpp"

namespace qnmf {

// Cayley-Dickson embedding chi(A) = [[A1, A2], [-conj(A2), conj(A1)]] with
// A = A1 + A2*j, A1 = w + x*i, A2 = y + z*i. Additive and multiplicative:
// chi(A*B) = chi(A)*chi(B). Its singular values double those of A.
ComplexMatrix complex_adjoint(const QMatrix& a);

struct QSVDFactors {
    QMatrix u;                 // m x m, unitary
    std::vector<double> sigma; // min(m, n), nonnegative, descending
    QMatrix v;                 // n x n, unitary
};

// Quaternion SVD through the complex adjoint: the adjoint spectrum is paired,
// one representative per pair is kept, and the quaternion singular vectors are
// rebuilt from the adjoint singular-vector blocks (group-wise Gram-Schmidt for
// repeated singular values), re-orthonormalized, and phase-normalized so the
// largest-modulus component of each U column is real where possible. Only the
// reconstruction U * diag(sigma) * V^H is contractual for degenerate spectra.
QSVDFactors qsvd(const QMatrix& a);

QMatrix qsvd_reconstruct(const QSVDFactors& f);

using SpectrumMap = std::function<std::vector<double>(const std::vector<double>&)>;

struct SpectrumShrinkOutcome {
    QMatrix result;
    std::vector<double> sigma_in;
    std::vector<double> sigma_out;
};

// Applies fn to the QSVD spectrum and rebuilds the matrix with unchanged
// singular subspaces, working entirely in the adjoint domain (no quaternion
// factor extraction). fn must return nonnegative values of the same length
// and map zero singular values to zero.
SpectrumShrinkOutcome qsvd_shrink_spectrum(const QMatrix& a, const SpectrumMap& fn);

} // namespace qnmf
