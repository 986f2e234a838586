#include "qnmf/fft.hpp"

#include <fftw3.h>

#include <mutex>
#include <stdexcept>

namespace qnmf {

namespace {

// FFTW planning is not thread-safe; execution of distinct plans is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

} // namespace

Spectrum fft2_r2c(const RealMatrix& in) {
    Spectrum s;
    s.rows = in.rows;
    s.cols = in.cols;
    s.a.assign(size_t(in.rows) * (in.cols / 2 + 1), {});
    std::vector<double> buf(in.v);
    fftw_plan plan;
    {
        std::lock_guard<std::mutex> lock(planner_mutex());
        plan = fftw_plan_dft_r2c_2d(in.rows, in.cols, buf.data(),
                                    reinterpret_cast<fftw_complex*>(s.a.data()), FFTW_ESTIMATE);
    }
    if (!plan) throw std::runtime_error("fft2_r2c: planner failed");
    fftw_execute(plan);
    {
        std::lock_guard<std::mutex> lock(planner_mutex());
        fftw_destroy_plan(plan);
    }
    return s;
}

RealMatrix fft2_c2r(const Spectrum& s) {
    RealMatrix out(s.rows, s.cols);
    std::vector<std::complex<double>> buf(s.a); // c2r destroys its input
    fftw_plan plan;
    {
        std::lock_guard<std::mutex> lock(planner_mutex());
        plan = fftw_plan_dft_c2r_2d(s.rows, s.cols, reinterpret_cast<fftw_complex*>(buf.data()),
                                    out.v.data(), FFTW_ESTIMATE);
    }
    if (!plan) throw std::runtime_error("fft2_c2r: planner failed");
    fftw_execute(plan);
    {
        std::lock_guard<std::mutex> lock(planner_mutex());
        fftw_destroy_plan(plan);
    }
    const double scale = 1.0 / (double(s.rows) * s.cols);
    for (auto& v : out.v) v *= scale;
    return out;
}

RealMatrix pad_kernel_centered(const RealMatrix& kernel, int rows, int cols) {
    if (kernel.rows > rows || kernel.cols > cols)
        throw std::invalid_argument("pad_kernel_centered: kernel larger than field");
    RealMatrix out(rows, cols);
    const int ch = kernel.rows / 2, cw = kernel.cols / 2;
    for (int u = 0; u < kernel.rows; ++u)
        for (int v = 0; v < kernel.cols; ++v) {
            const int i = ((u - ch) % rows + rows) % rows;
            const int j = ((v - cw) % cols + cols) % cols;
            out(i, j) += kernel(u, v);
        }
    return out;
}

RealMatrix component_plane(const QMatrix& x, int c) {
    RealMatrix p(x.rows(), x.cols());
    for (int i = 0; i < x.rows(); ++i)
        for (int j = 0; j < x.cols(); ++j) {
            const Quaternion& q = x(i, j);
            p(i, j) = c == 0 ? q.w : c == 1 ? q.x : c == 2 ? q.y : q.z;
        }
    return p;
}

void set_component_plane(QMatrix& x, int c, const RealMatrix& plane) {
    for (int i = 0; i < x.rows(); ++i)
        for (int j = 0; j < x.cols(); ++j) {
            Quaternion& q = x(i, j);
            (c == 0 ? q.w : c == 1 ? q.x : c == 2 ? q.y : q.z) = plane(i, j);
        }
}

QMatrix convolve_periodic(const QMatrix& x, const RealMatrix& kernel) {
    const Spectrum kf = fft2_r2c(pad_kernel_centered(kernel, x.rows(), x.cols()));
    QMatrix out(x.rows(), x.cols());
    for (int c = 0; c < 4; ++c) {
        Spectrum pf = fft2_r2c(component_plane(x, c));
        for (size_t t = 0; t < pf.a.size(); ++t) pf.a[t] *= kf.a[t];
        set_component_plane(out, c, fft2_c2r(pf));
    }
    return out;
}

} // namespace qnmf
