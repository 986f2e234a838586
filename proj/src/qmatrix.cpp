#include "qnmf/qmatrix.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qnmf {

QMatrix QMatrix::identity(int n) {
    QMatrix m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = Quaternion::real(1.0);
    return m;
}

QMatrix& QMatrix::operator+=(const QMatrix& o) {
    if (rows_ != o.rows_ || cols_ != o.cols_) throw std::invalid_argument("QMatrix +=: shape mismatch");
    for (size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
    return *this;
}

QMatrix& QMatrix::operator-=(const QMatrix& o) {
    if (rows_ != o.rows_ || cols_ != o.cols_) throw std::invalid_argument("QMatrix -=: shape mismatch");
    for (size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
    return *this;
}

QMatrix& QMatrix::operator*=(double s) {
    for (auto& q : data_) q *= s;
    return *this;
}

QMatrix QMatrix::operator+(const QMatrix& o) const {
    QMatrix r = *this;
    r += o;
    return r;
}

QMatrix QMatrix::operator-(const QMatrix& o) const {
    QMatrix r = *this;
    r -= o;
    return r;
}

QMatrix QMatrix::operator*(double s) const {
    QMatrix r = *this;
    r *= s;
    return r;
}

bool QMatrix::all_finite() const {
    for (const auto& q : data_)
        if (!q.finite()) return false;
    return true;
}

QMatrix qmat_mul(const QMatrix& a, const QMatrix& b) {
    if (a.cols() != b.rows()) throw std::invalid_argument("qmat_mul: inner dimensions differ");
    QMatrix c(a.rows(), b.cols());
    for (int i = 0; i < a.rows(); ++i) {
        for (int j = 0; j < a.cols(); ++j) {
            const Quaternion aij = a(i, j);
            if (aij.norm_sq() == 0.0) continue;
            for (int k = 0; k < b.cols(); ++k) c(i, k) += aij * b(j, k);
        }
    }
    return c;
}

QMatrix hermitian_transpose(const QMatrix& a) {
    QMatrix t(a.cols(), a.rows());
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) t(j, i) = a(i, j).conj();
    return t;
}

double frobenius_norm(const QMatrix& a) {
    double s = 0.0;
    for (size_t i = 0; i < a.size(); ++i) s += a.data()[i].norm_sq();
    return std::sqrt(s);
}

double l1_norm(const QMatrix& a) {
    double s = 0.0;
    for (size_t i = 0; i < a.size(); ++i) s += a.data()[i].abs();
    return s;
}

double real_trace(const QMatrix& a) {
    if (a.rows() != a.cols()) throw std::invalid_argument("real_trace: matrix not square");
    double s = 0.0;
    for (int i = 0; i < a.rows(); ++i) s += a(i, i).w;
    return s;
}

QMatrix hadamard(const QMatrix& a, const RealMatrix& mask) {
    if (a.rows() != mask.rows || a.cols() != mask.cols)
        throw std::invalid_argument("hadamard: shape mismatch");
    QMatrix r(a.rows(), a.cols());
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) r(i, j) = a(i, j) * mask(i, j);
    return r;
}

double frobenius_distance(const QMatrix& a, const QMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw std::invalid_argument("frobenius_distance: shape mismatch");
    double s = 0.0;
    for (size_t i = 0; i < a.size(); ++i) s += (a.data()[i] - b.data()[i]).norm_sq();
    return std::sqrt(s);
}

QMatrix rgb_encode(const RgbImage& img) {
    QMatrix q(img.height, img.width);
    for (int i = 0; i < img.height; ++i)
        for (int j = 0; j < img.width; ++j) {
            const size_t p = size_t(i) * img.width + j;
            q(i, j) = Quaternion{0.0, img.r[p], img.g[p], img.b[p]};
        }
    return q;
}

RgbImage rgb_decode(const QMatrix& q, double* max_abs_real) {
    RgbImage img(q.rows(), q.cols());
    double worst = 0.0;
    auto clamp255 = [](double v) { return std::clamp(v, 0.0, 255.0); };
    for (int i = 0; i < q.rows(); ++i)
        for (int j = 0; j < q.cols(); ++j) {
            const Quaternion& e = q(i, j);
            worst = std::max(worst, std::fabs(e.w));
            const size_t p = size_t(i) * q.cols() + j;
            img.r[p] = clamp255(e.x);
            img.g[p] = clamp255(e.y);
            img.b[p] = clamp255(e.z);
        }
    if (max_abs_real) *max_abs_real = worst;
    return img;
}

} // namespace qnmf
