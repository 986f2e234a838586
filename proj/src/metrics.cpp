#include "qnmf/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace qnmf {

namespace {

void check_same_shape(const RgbImage& a, const RgbImage& b, const char* who) {
    if (a.height != b.height || a.width != b.width)
        throw std::invalid_argument(std::string(who) + ": shape mismatch");
}

// separable Gaussian filter, valid region only
std::vector<double> gauss_taps(int radius, double std_dev) {
    std::vector<double> t(2 * radius + 1);
    double sum = 0.0;
    for (int i = -radius; i <= radius; ++i) {
        t[i + radius] = std::exp(-0.5 * (i * i) / (std_dev * std_dev));
        sum += t[i + radius];
    }
    for (auto& v : t) v /= sum;
    return t;
}

RealMatrix filter_valid(const RealMatrix& in, const std::vector<double>& taps) {
    const int r = (int(taps.size()) - 1) / 2;
    RealMatrix rowpass(in.rows, in.cols - 2 * r);
    for (int i = 0; i < in.rows; ++i)
        for (int j = 0; j < rowpass.cols; ++j) {
            double s = 0.0;
            for (int t = 0; t < int(taps.size()); ++t) s += taps[t] * in(i, j + t);
            rowpass(i, j) = s;
        }
    RealMatrix out(in.rows - 2 * r, rowpass.cols);
    for (int i = 0; i < out.rows; ++i)
        for (int j = 0; j < out.cols; ++j) {
            double s = 0.0;
            for (int t = 0; t < int(taps.size()); ++t) s += taps[t] * rowpass(i + t, j);
            out(i, j) = s;
        }
    return out;
}

double ssim_channel(const std::vector<double>& x, const std::vector<double>& y, int h, int w) {
    constexpr double c1 = (0.01 * 255.0) * (0.01 * 255.0);
    constexpr double c2 = (0.03 * 255.0) * (0.03 * 255.0);
    const auto taps = gauss_taps(5, 1.5);

    RealMatrix mx(h, w), my(h, w), mxx(h, w), myy(h, w), mxy(h, w);
    for (int i = 0; i < h; ++i)
        for (int j = 0; j < w; ++j) {
            const double a = x[size_t(i) * w + j], b = y[size_t(i) * w + j];
            mx(i, j) = a;
            my(i, j) = b;
            mxx(i, j) = a * a;
            myy(i, j) = b * b;
            mxy(i, j) = a * b;
        }
    const RealMatrix u1 = filter_valid(mx, taps);
    const RealMatrix u2 = filter_valid(my, taps);
    const RealMatrix s11 = filter_valid(mxx, taps);
    const RealMatrix s22 = filter_valid(myy, taps);
    const RealMatrix s12 = filter_valid(mxy, taps);

    double acc = 0.0;
    for (int i = 0; i < u1.rows; ++i)
        for (int j = 0; j < u1.cols; ++j) {
            const double m1 = u1(i, j), m2 = u2(i, j);
            const double v1 = s11(i, j) - m1 * m1;
            const double v2 = s22(i, j) - m2 * m2;
            const double cv = s12(i, j) - m1 * m2;
            acc += ((2.0 * m1 * m2 + c1) * (2.0 * cv + c2)) /
                   ((m1 * m1 + m2 * m2 + c1) * (v1 + v2 + c2));
        }
    return acc / (double(u1.rows) * u1.cols);
}

double median_inplace(std::vector<double>& v) {
    if (v.empty()) return 0.0;
    const size_t mid = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + mid, v.end());
    double m = v[mid];
    if (v.size() % 2 == 0) {
        std::nth_element(v.begin(), v.begin() + mid - 1, v.begin() + mid);
        m = 0.5 * (m + v[mid - 1]);
    }
    return m;
}

} // namespace

double psnr(const RgbImage& ref, const RgbImage& test) {
    check_same_shape(ref, test, "psnr");
    double se = 0.0;
    for (size_t p = 0; p < ref.pixels(); ++p) {
        const double dr = ref.r[p] - test.r[p];
        const double dg = ref.g[p] - test.g[p];
        const double db = ref.b[p] - test.b[p];
        se += dr * dr + dg * dg + db * db;
    }
    const double mse = se / (3.0 * double(ref.pixels()));
    if (mse == 0.0) return 99.0;
    return 10.0 * std::log10(255.0 * 255.0 / mse);
}

double ssim(const RgbImage& ref, const RgbImage& test) {
    check_same_shape(ref, test, "ssim");
    if (std::min(ref.height, ref.width) < 11)
        throw std::invalid_argument("ssim: image smaller than the 11x11 window");
    const double s = ssim_channel(ref.r, test.r, ref.height, ref.width) +
                     ssim_channel(ref.g, test.g, ref.height, ref.width) +
                     ssim_channel(ref.b, test.b, ref.height, ref.width);
    return s / 3.0;
}

QualityReport quality(const RgbImage& ref, const RgbImage& test) {
    return {psnr(ref, test), ssim(ref, test)};
}

double estimate_noise(const RgbImage& img) {
    if (img.height < 16 || img.width < 16)
        throw std::invalid_argument("estimate_noise: image smaller than 16x16");
    const std::vector<double>* planes[3] = {&img.r, &img.g, &img.b};
    double total = 0.0;
    std::vector<double> d;
    d.reserve(size_t(img.height - 1) * (img.width - 1));
    for (const auto* plane : planes) {
        d.clear();
        for (int i = 0; i + 1 < img.height; ++i)
            for (int j = 0; j + 1 < img.width; ++j) {
                const double v = (*plane)[size_t(i) * img.width + j] -
                                 (*plane)[size_t(i) * img.width + j + 1] -
                                 (*plane)[size_t(i + 1) * img.width + j] +
                                 (*plane)[size_t(i + 1) * img.width + j + 1];
                d.push_back(std::fabs(0.5 * v));
            }
        total += median_inplace(d) / 0.6745;
    }
    return total / 3.0;
}

} // namespace qnmf
