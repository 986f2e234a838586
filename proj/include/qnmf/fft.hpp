#pragma once

#include <complex>
#include <vector>

#include "qnmf/qmatrix.hpp"

namespace qnmf {

// Half-spectrum of a rows x cols real field: rows x (cols/2 + 1) complex bins.
struct Spectrum {
    int rows{0}, cols{0}; // spatial dimensions
    std::vector<std::complex<double>> a;

    int bins_per_row() const { return cols / 2 + 1; }
    std::complex<double>& operator()(int i, int j) { return a[size_t(i) * bins_per_row() + j]; }
    std::complex<double> operator()(int i, int j) const { return a[size_t(i) * bins_per_row() + j]; }
};

Spectrum fft2_r2c(const RealMatrix& in);

// Normalized inverse (round trip is the identity).
RealMatrix fft2_c2r(const Spectrum& s);

// Kernel embedded in a rows x cols field, circularly shifted so that its
// center cell (kh/2, kw/2) lands at the origin. Multiplying spectra by the
// transform of this field realizes periodic convolution anchored at the
// kernel center.
RealMatrix pad_kernel_centered(const RealMatrix& kernel, int rows, int cols);

// Periodic convolution of each quaternion component plane by a real kernel.
QMatrix convolve_periodic(const QMatrix& x, const RealMatrix& kernel);

// Component-plane access (0 = w, 1 = x, 2 = y, 3 = z).
RealMatrix component_plane(const QMatrix& x, int c);
void set_component_plane(QMatrix& x, int c, const RealMatrix& plane);

} // namespace qnmf
