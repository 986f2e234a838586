#pragma once

#include <complex>
#include <vector>

namespace qnmf {

using cplx = std::complex<double>;

// Dense complex matrix, row-major.
struct ComplexMatrix {
    int rows{0}, cols{0};
    std::vector<cplx> a;

    ComplexMatrix() = default;
    ComplexMatrix(int r, int c) : rows{r}, cols{c}, a(size_t(r) * c) {}

    cplx& operator()(int i, int j) { return a[size_t(i) * cols + j]; }
    cplx operator()(int i, int j) const { return a[size_t(i) * cols + j]; }
};

ComplexMatrix cmat_mul(const ComplexMatrix& x, const ComplexMatrix& y);
ComplexMatrix cmat_hermitian(const ComplexMatrix& x);

struct ComplexSvd {
    ComplexMatrix u;           // rows x rows, unitary
    std::vector<double> sigma; // min(rows, cols), nonnegative, descending
    ComplexMatrix v;           // cols x cols, unitary
};

// Full SVD m = u * diag(sigma) * v^H via one-sided Jacobi on the thin side.
// Throws std::runtime_error if the sweep cap is exhausted without convergence.
ComplexSvd complex_svd(const ComplexMatrix& m);

// One-sided Jacobi core. Orthogonalizes the columns of w (rows x cols,
// column-major) in place and accumulates the applied rotations into j
// (cols x cols, column-major, initialized to identity here), so that
// w_in * j = w_out. On return columns are sorted by descending norm and
// sigma holds those norms. Relative off-diagonal tolerance 1e-13, cap 30
// sweeps.
void jacobi_orthogonalize(std::vector<cplx>& w, int rows, int cols,
                          std::vector<cplx>& j, std::vector<double>& sigma);

} // namespace qnmf
