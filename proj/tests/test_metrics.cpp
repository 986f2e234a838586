#include <doctest.h>

#include "qnmf/imaging.hpp"
#include "qnmf/metrics.hpp"
#include "support.hpp"

using namespace qnmf;

TEST_CASE("psnr basics") {
    const RgbImage a = testsup::textured_card(32, 32);
    CHECK(psnr(a, a) == doctest::Approx(99.0));

    RgbImage zero(16, 16), full(16, 16);
    for (size_t p = 0; p < full.pixels(); ++p) full.r[p] = full.g[p] = full.b[p] = 255.0;
    CHECK(psnr(zero, full) == doctest::Approx(0.0));

    RgbImage shifted = a;
    for (size_t p = 0; p < a.pixels(); ++p) {
        shifted.r[p] = a.r[p] + 5.0;
        shifted.g[p] = a.g[p] + 5.0;
        shifted.b[p] = a.b[p] + 5.0;
    }
    CHECK(psnr(a, shifted) == doctest::Approx(10.0 * std::log10(255.0 * 255.0 / 25.0)).epsilon(1e-12));
    CHECK(psnr(a, shifted) == doctest::Approx(34.15).epsilon(1e-3));
    CHECK(psnr(a, shifted) == doctest::Approx(psnr(shifted, a)));

    CHECK_THROWS_AS(psnr(a, zero), std::invalid_argument);
}

TEST_CASE("ssim basics") {
    const RgbImage a = testsup::textured_card(128, 128);
    CHECK(ssim(a, a) == doctest::Approx(1.0));

    const RgbImage noisy = degrade(a, DegradationSpec::noise(50.0), 1).image;
    CHECK(ssim(a, noisy) < 0.5);

    // constant vs constant: only the stabilized luminance term remains
    RgbImage c1(16, 16), c2(16, 16);
    for (size_t p = 0; p < c1.pixels(); ++p) {
        c1.r[p] = c1.g[p] = c1.b[p] = 100.0;
        c2.r[p] = c2.g[p] = c2.b[p] = 140.0;
    }
    const double c1c = (0.01 * 255) * (0.01 * 255);
    const double lum = (2.0 * 100.0 * 140.0 + c1c) / (100.0 * 100.0 + 140.0 * 140.0 + c1c);
    CHECK(ssim(c1, c2) == doctest::Approx(lum).epsilon(1e-9));

    CHECK_THROWS_AS(ssim(RgbImage(8, 8), RgbImage(8, 8)), std::invalid_argument);
}

TEST_CASE("psnr decreases as noise grows") {
    const RgbImage a = testsup::textured_card(64, 64);
    double prev = 1e9;
    for (double s : {5.0, 15.0, 30.0, 60.0}) {
        const double v = psnr(a, degrade(a, DegradationSpec::noise(s), 7).image);
        CHECK(v < prev);
        prev = v;
    }
}

TEST_CASE("noise estimator") {
    RgbImage flat(32, 32);
    for (size_t p = 0; p < flat.pixels(); ++p) flat.r[p] = flat.g[p] = flat.b[p] = 77.0;
    CHECK(estimate_noise(flat) == 0.0);

    RgbImage piecewise(64, 64);
    for (int i = 0; i < 64; ++i)
        for (int j = 0; j < 64; ++j) {
            const size_t p = size_t(i) * 64 + j;
            const double v = (i < 32) == (j < 32) ? 40.0 : 200.0;
            piecewise.r[p] = piecewise.g[p] = piecewise.b[p] = v;
        }
    CHECK(estimate_noise(piecewise) <= 2.0);

    const RgbImage card = testsup::textured_card(256, 256);
    const RgbImage noisy = degrade(card, DegradationSpec::noise(30.0), 3).image;
    const double est = estimate_noise(noisy);
    CHECK(est >= 30.0 * 0.85);
    CHECK(est <= 30.0 * 1.15);

    CHECK_THROWS_AS(estimate_noise(RgbImage(8, 8)), std::invalid_argument);
}
