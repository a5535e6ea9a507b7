// PNG (8-bit, via libpng) and PPM P6 raster I/O, plus 0/255 mask dumps.
#pragma once

#include <png.h>

#include <cstdio>
#include <memory>
#include <string>

#include "dotstereo/image.hpp"

namespace dotstereo {

namespace detail {

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

inline RgbImage read_ppm(std::FILE* f, const std::string& path) {
    // Header: "P6" <ws> width <ws> height <ws> maxval, single whitespace
    // after maxval, then binary data. '#' comments allowed between tokens.
    const auto next_token = [&] {
        std::string tok;
        int c;
        while ((c = std::fgetc(f)) != EOF) {
            if (c == '#') {
                while ((c = std::fgetc(f)) != EOF && c != '\n') {
                }
                continue;
            }
            if (std::isspace(c)) {
                if (!tok.empty()) break;
                continue;
            }
            tok.push_back(static_cast<char>(c));
        }
        require(!tok.empty(), path + ": truncated PPM header");
        return tok;
    };
    require(next_token() == "P6", path + ": not a P6 PPM");
    const int w = std::stoi(next_token());
    const int h = std::stoi(next_token());
    const int maxval = std::stoi(next_token());
    require(w > 0 && h > 0, path + ": bad PPM dimensions");
    require(maxval == 255, path + ": only maxval 255 PPM supported");
    RgbImage img(w, h);
    require(std::fread(img.data.data(), 1, img.data.size(), f) == img.data.size(),
            path + ": truncated PPM data");
    return img;
}

}  // namespace detail

// Reads an 8-bit RGB image: PNG (any color type, converted to RGB) or PPM P6.
inline RgbImage read_image(const std::string& path) {
    detail::FilePtr f(std::fopen(path.c_str(), "rb"));
    require(f != nullptr, path + ": cannot open");
    unsigned char sig[8];
    require(std::fread(sig, 1, 8, f.get()) == 8, path + ": truncated file");
    if (sig[0] == 'P' && sig[1] == '6') {
        std::rewind(f.get());
        return detail::read_ppm(f.get(), path);
    }
    require(png_sig_cmp(sig, 0, 8) == 0, path + ": neither PNG nor PPM P6");

    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    require(png != nullptr, "libpng: out of memory");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        require(false, "libpng: out of memory");
    }
    RgbImage img;
    std::vector<png_bytep> rows;
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw std::runtime_error(path + ": PNG decode error");
    }
    png_init_io(png, f.get());
    png_set_sig_bytes(png, 8);
    png_read_info(png, info);

    // Normalize every input variant to 8-bit RGB.
    png_set_expand(png);
    png_set_strip_16(png);
    png_set_strip_alpha(png);
    png_set_gray_to_rgb(png);
    png_read_update_info(png, info);
    img = RgbImage(static_cast<int>(png_get_image_width(png, info)),
                   static_cast<int>(png_get_image_height(png, info)));
    require(png_get_rowbytes(png, info) == static_cast<size_t>(img.width) * 3,
            path + ": unexpected PNG row size");
    rows.resize(img.height);
    for (int y = 0; y < img.height; ++y) rows[y] = img.px(0, y);
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);
    return img;
}

namespace detail {

inline void write_png_impl(const std::string& path, int width, int height, int color_type,
                           const std::vector<png_bytep>& rows) {
    FilePtr f(std::fopen(path.c_str(), "wb"));
    require(f != nullptr, path + ": cannot open for writing");
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    require(png != nullptr, "libpng: out of memory");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        require(false, "libpng: out of memory");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw std::runtime_error(path + ": PNG encode error");
    }
    png_init_io(png, f.get());
    png_set_IHDR(png, info, width, height, 8, color_type, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    png_write_image(png, const_cast<png_bytep*>(rows.data()));
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

}  // namespace detail

inline void write_png(const std::string& path, const RgbImage& img) {
    require(img.width > 0 && img.height > 0, "write_png: empty image");
    std::vector<png_bytep> rows(img.height);
    for (int y = 0; y < img.height; ++y)
        rows[y] = const_cast<png_bytep>(img.px(0, y));
    detail::write_png_impl(path, img.width, img.height, PNG_COLOR_TYPE_RGB, rows);
}

// 0/255 grayscale dump of a binary mask.
inline void write_png(const std::string& path, const BinaryMask& mask) {
    require(mask.width > 0 && mask.height > 0, "write_png: empty mask");
    std::vector<uint8_t> bytes(mask.data.size());
    for (size_t i = 0; i < bytes.size(); ++i) bytes[i] = mask.data[i] ? 255 : 0;
    std::vector<png_bytep> rows(mask.height);
    for (int y = 0; y < mask.height; ++y)
        rows[y] = &bytes[static_cast<size_t>(y) * mask.width];
    detail::write_png_impl(path, mask.width, mask.height, PNG_COLOR_TYPE_GRAY, rows);
}

// Grayscale dump of a [0,1] scalar image, rounded to 8 bits.
inline void write_png(const std::string& path, const ScalarImage& img) {
    require(img.width > 0 && img.height > 0, "write_png: empty image");
    std::vector<uint8_t> bytes(img.data.size());
    for (size_t i = 0; i < bytes.size(); ++i)
        bytes[i] = static_cast<uint8_t>(
            std::lround(std::clamp(img.data[i], 0.f, 1.f) * 255.f));
    std::vector<png_bytep> rows(img.height);
    for (int y = 0; y < img.height; ++y)
        rows[y] = &bytes[static_cast<size_t>(y) * img.width];
    detail::write_png_impl(path, img.width, img.height, PNG_COLOR_TYPE_GRAY, rows);
}

}  // namespace dotstereo
