#include "qnmf/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>
#include <stdexcept>
#include <vector>

namespace qnmf {

namespace {

uint8_t to_byte(double v) {
    return uint8_t(std::clamp(std::llround(v), 0ll, 255ll));
}

std::string lower_ext(const std::string& path) {
    const auto dot = path.find_last_of('.');
    if (dot == std::string::npos) return {};
    std::string e = path.substr(dot + 1);
    std::transform(e.begin(), e.end(), e.begin(), [](unsigned char c) { return std::tolower(c); });
    return e;
}

// skips whitespace and '#' comments in PNM headers
int pnm_next_int(std::istream& is) {
    int c;
    while ((c = is.get()) != EOF) {
        if (c == '#') {
            while ((c = is.get()) != EOF && c != '\n') {}
        } else if (!std::isspace(c)) {
            is.unget();
            break;
        }
    }
    int v;
    if (!(is >> v)) throw std::runtime_error("PNM: malformed header");
    return v;
}

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

} // namespace

RgbImage read_ppm(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("read_ppm: cannot open " + path);
    char m0 = 0, m1 = 0;
    is.get(m0);
    is.get(m1);
    if (m0 != 'P' || m1 != '6') throw std::runtime_error("read_ppm: not a P6 file: " + path);
    const int w = pnm_next_int(is);
    const int h = pnm_next_int(is);
    const int maxval = pnm_next_int(is);
    if (maxval != 255) throw std::runtime_error("read_ppm: only maxval 255 supported");
    is.get(); // single whitespace after header
    std::vector<uint8_t> buf(size_t(w) * h * 3);
    is.read(reinterpret_cast<char*>(buf.data()), std::streamsize(buf.size()));
    if (size_t(is.gcount()) != buf.size()) throw std::runtime_error("read_ppm: truncated file");
    RgbImage img(h, w);
    for (size_t p = 0; p < img.pixels(); ++p) {
        img.r[p] = buf[3 * p];
        img.g[p] = buf[3 * p + 1];
        img.b[p] = buf[3 * p + 2];
    }
    return img;
}

void write_ppm(const std::string& path, const RgbImage& img) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("write_ppm: cannot open " + path);
    os << "P6\n" << img.width << ' ' << img.height << "\n255\n";
    std::vector<uint8_t> buf(img.pixels() * 3);
    for (size_t p = 0; p < img.pixels(); ++p) {
        buf[3 * p] = to_byte(img.r[p]);
        buf[3 * p + 1] = to_byte(img.g[p]);
        buf[3 * p + 2] = to_byte(img.b[p]);
    }
    os.write(reinterpret_cast<const char*>(buf.data()), std::streamsize(buf.size()));
    if (!os) throw std::runtime_error("write_ppm: write failed");
}

RgbImage read_png(const std::string& path) {
    FilePtr f(std::fopen(path.c_str(), "rb"));
    if (!f) throw std::runtime_error("read_png: cannot open " + path);
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) throw std::runtime_error("read_png: init failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        throw std::runtime_error("read_png: init failed");
    }
    std::vector<std::vector<png_byte>> rows;
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw std::runtime_error("read_png: decode failed for " + path);
    }
    png_init_io(png, f.get());
    png_read_info(png, info);

    png_set_expand(png);
    png_set_strip_16(png);
    png_set_strip_alpha(png);
    png_set_gray_to_rgb(png);
    png_read_update_info(png, info);

    const int w = int(png_get_image_width(png, info));
    const int h = int(png_get_image_height(png, info));
    const size_t stride = png_get_rowbytes(png, info);
    rows.assign(h, std::vector<png_byte>(stride));
    std::vector<png_bytep> ptrs(h);
    for (int i = 0; i < h; ++i) ptrs[i] = rows[i].data();
    png_read_image(png, ptrs.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);

    RgbImage img(h, w);
    for (int i = 0; i < h; ++i)
        for (int j = 0; j < w; ++j) {
            const size_t p = size_t(i) * w + j;
            img.r[p] = rows[i][3 * j];
            img.g[p] = rows[i][3 * j + 1];
            img.b[p] = rows[i][3 * j + 2];
        }
    return img;
}

void write_png(const std::string& path, const RgbImage& img) {
    FilePtr f(std::fopen(path.c_str(), "wb"));
    if (!f) throw std::runtime_error("write_png: cannot open " + path);
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) throw std::runtime_error("write_png: init failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        throw std::runtime_error("write_png: init failed");
    }
    std::vector<std::vector<png_byte>> rows(img.height, std::vector<png_byte>(size_t(img.width) * 3));
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw std::runtime_error("write_png: encode failed for " + path);
    }
    png_init_io(png, f.get());
    png_set_IHDR(png, info, png_uint_32(img.width), png_uint_32(img.height), 8,
                 PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
                 PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    for (int i = 0; i < img.height; ++i) {
        for (int j = 0; j < img.width; ++j) {
            const size_t p = size_t(i) * img.width + j;
            rows[i][3 * j] = to_byte(img.r[p]);
            rows[i][3 * j + 1] = to_byte(img.g[p]);
            rows[i][3 * j + 2] = to_byte(img.b[p]);
        }
        png_write_row(png, rows[i].data());
    }
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

RgbImage read_image(const std::string& path) {
    const std::string ext = lower_ext(path);
    if (ext == "png") return read_png(path);
    if (ext == "ppm") return read_ppm(path);
    throw std::runtime_error("read_image: unsupported extension: " + path);
}

void write_image(const std::string& path, const RgbImage& img) {
    const std::string ext = lower_ext(path);
    if (ext == "png") return write_png(path, img);
    if (ext == "ppm") return write_ppm(path, img);
    throw std::runtime_error("write_image: unsupported extension: " + path);
}

RealMatrix read_mask(const std::string& path) {
    const std::string ext = lower_ext(path);
    RealMatrix mask;
    if (ext == "pgm") {
        std::ifstream is(path, std::ios::binary);
        if (!is) throw std::runtime_error("read_mask: cannot open " + path);
        char m0 = 0, m1 = 0;
        is.get(m0);
        is.get(m1);
        if (m0 != 'P' || m1 != '5') throw std::runtime_error("read_mask: not a P5 file");
        const int w = pnm_next_int(is);
        const int h = pnm_next_int(is);
        const int maxval = pnm_next_int(is);
        if (maxval != 255) throw std::runtime_error("read_mask: only maxval 255 supported");
        is.get();
        std::vector<uint8_t> buf(size_t(w) * h);
        is.read(reinterpret_cast<char*>(buf.data()), std::streamsize(buf.size()));
        if (size_t(is.gcount()) != buf.size()) throw std::runtime_error("read_mask: truncated file");
        mask = RealMatrix(h, w);
        for (size_t p = 0; p < buf.size(); ++p) mask.v[p] = buf[p] > 0 ? 1.0 : 0.0;
    } else if (ext == "png") {
        const RgbImage img = read_png(path);
        mask = RealMatrix(img.height, img.width);
        for (size_t p = 0; p < img.pixels(); ++p) mask.v[p] = img.r[p] > 0.0 ? 1.0 : 0.0;
    } else {
        throw std::runtime_error("read_mask: unsupported extension: " + path);
    }
    return mask;
}

void write_mask(const std::string& path, const RealMatrix& mask) {
    const std::string ext = lower_ext(path);
    if (ext == "pgm") {
        std::ofstream os(path, std::ios::binary);
        if (!os) throw std::runtime_error("write_mask: cannot open " + path);
        os << "P5\n" << mask.cols << ' ' << mask.rows << "\n255\n";
        std::vector<uint8_t> buf(mask.v.size());
        for (size_t p = 0; p < buf.size(); ++p) buf[p] = mask.v[p] != 0.0 ? 255 : 0;
        os.write(reinterpret_cast<const char*>(buf.data()), std::streamsize(buf.size()));
    } else if (ext == "png") {
        RgbImage img(mask.rows, mask.cols);
        for (size_t p = 0; p < img.pixels(); ++p)
            img.r[p] = img.g[p] = img.b[p] = mask.v[p] != 0.0 ? 255.0 : 0.0;
        write_png(path, img);
    } else {
        throw std::runtime_error("write_mask: unsupported extension: " + path);
    }
}

} // namespace qnmf
