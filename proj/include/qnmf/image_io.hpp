#pragma once

#include <string>

#include "qnmf/qmatrix.hpp"

namespace qnmf {

// 8-bit RGB image files. PNG via libpng; PPM (P6, maxval 255) as the
// dependency-free fallback with a bit-exact round trip. Values are rounded
// and clamped to [0, 255] on write. Dispatch is by extension.
RgbImage read_image(const std::string& path);
void write_image(const std::string& path, const RgbImage& img);

RgbImage read_ppm(const std::string& path);
void write_ppm(const std::string& path, const RgbImage& img);

RgbImage read_png(const std::string& path);
void write_png(const std::string& path, const RgbImage& img);

// Single-channel masks, 0 = missing (stored as 0/255). PNG or PGM (P5).
RealMatrix read_mask(const std::string& path);
void write_mask(const std::string& path, const RealMatrix& mask);

} // namespace qnmf
