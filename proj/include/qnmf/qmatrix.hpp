#pragma once

#include <cstddef>
#include <vector>

#include "qnmf/quaternion.hpp"

namespace qnmf {

// Dense real matrix, row-major. Used for masks, kernels and channel planes.
struct RealMatrix {
    int rows{0}, cols{0};
    std::vector<double> v;

    RealMatrix() = default;
    RealMatrix(int r, int c, double fill = 0.0) : rows{r}, cols{c}, v(size_t(r) * c, fill) {}

    double& operator()(int i, int j) { return v[size_t(i) * cols + j]; }
    double operator()(int i, int j) const { return v[size_t(i) * cols + j]; }
};

// Dense quaternion matrix, row-major, (w,x,y,z) interleaved per entry.
class QMatrix {
public:
    QMatrix() = default;
    QMatrix(int rows, int cols) : rows_{rows}, cols_{cols}, data_(size_t(rows) * cols) {}

    static QMatrix identity(int n);

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    size_t size() const { return data_.size(); }

    Quaternion& operator()(int i, int j) { return data_[size_t(i) * cols_ + j]; }
    const Quaternion& operator()(int i, int j) const { return data_[size_t(i) * cols_ + j]; }

    Quaternion* data() { return data_.data(); }
    const Quaternion* data() const { return data_.data(); }

    QMatrix& operator+=(const QMatrix& o);
    QMatrix& operator-=(const QMatrix& o);
    QMatrix& operator*=(double s);
    QMatrix operator+(const QMatrix& o) const;
    QMatrix operator-(const QMatrix& o) const;
    QMatrix operator*(double s) const;

    bool all_finite() const;

private:
    int rows_{0}, cols_{0};
    std::vector<Quaternion> data_;
};

// Matrix product over the quaternion ring; throws on dimension mismatch.
QMatrix qmat_mul(const QMatrix& a, const QMatrix& b);

QMatrix hermitian_transpose(const QMatrix& a);

double frobenius_norm(const QMatrix& a);
double l1_norm(const QMatrix& a);

// Real part of the trace; requires a square matrix.
double real_trace(const QMatrix& a);

// Entrywise product with a real mask of the same shape.
QMatrix hadamard(const QMatrix& a, const RealMatrix& mask);

double frobenius_distance(const QMatrix& a, const QMatrix& b);

// 8-bit-scale RGB image: three planes of reals in [0, 255].
struct RgbImage {
    int height{0}, width{0};
    std::vector<double> r, g, b;

    RgbImage() = default;
    RgbImage(int h, int w)
        : height{h}, width{w}, r(size_t(h) * w, 0.0), g(size_t(h) * w, 0.0), b(size_t(h) * w, 0.0) {}

    size_t pixels() const { return size_t(height) * width; }
};

// Pure-quaternion encoding: w = 0, (x,y,z) = (R,G,B).
QMatrix rgb_encode(const RgbImage& img);

// Drops the real part (reporting its largest modulus) and clamps channels to [0, 255].
RgbImage rgb_decode(const QMatrix& q, double* max_abs_real = nullptr);

} // namespace qnmf
