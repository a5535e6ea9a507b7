// Core raster containers shared by the whole pipeline.
//
// Coordinate convention: x indexes columns, y indexes rows, the sample point
// of pixel (x, y) is at the integer position (x, y). Data is row-major.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace dotstereo {

struct ScalarImage {
    int width = 0;
    int height = 0;
    std::vector<float> data;  // values in [0, 1]

    ScalarImage() = default;
    ScalarImage(int w, int h, float fill = 0.f)
        : width(w), height(h), data(static_cast<size_t>(w) * h, fill) {}

    float& at(int x, int y) { return data[static_cast<size_t>(y) * width + x]; }
    float at(int x, int y) const { return data[static_cast<size_t>(y) * width + x]; }
    // Clamped access, i.e. replicate padding at the borders.
    float at_clamped(int x, int y) const {
        if (x < 0) x = 0;
        if (x >= width) x = width - 1;
        if (y < 0) y = 0;
        if (y >= height) y = height - 1;
        return at(x, y);
    }
    bool in_bounds(int x, int y) const { return x >= 0 && x < width && y >= 0 && y < height; }
    size_t size() const { return data.size(); }
};

struct RgbImage {
    int width = 0;
    int height = 0;
    std::vector<uint8_t> data;  // r,g,b interleaved

    RgbImage() = default;
    RgbImage(int w, int h) : width(w), height(h), data(static_cast<size_t>(w) * h * 3, 0) {}

    uint8_t* px(int x, int y) { return &data[(static_cast<size_t>(y) * width + x) * 3]; }
    const uint8_t* px(int x, int y) const { return &data[(static_cast<size_t>(y) * width + x) * 3]; }
    void set(int x, int y, uint8_t r, uint8_t g, uint8_t b) {
        uint8_t* p = px(x, y);
        p[0] = r;
        p[1] = g;
        p[2] = b;
    }
    bool in_bounds(int x, int y) const { return x >= 0 && x < width && y >= 0 && y < height; }
    size_t pixel_count() const { return static_cast<size_t>(width) * height; }
};

struct BinaryMask {
    int width = 0;
    int height = 0;
    std::vector<uint8_t> data;  // 0 or 1

    BinaryMask() = default;
    BinaryMask(int w, int h, uint8_t fill = 0)
        : width(w), height(h), data(static_cast<size_t>(w) * h, fill) {}

    uint8_t& at(int x, int y) { return data[static_cast<size_t>(y) * width + x]; }
    uint8_t at(int x, int y) const { return data[static_cast<size_t>(y) * width + x]; }
    bool test(int x, int y) const {
        return x >= 0 && x < width && y >= 0 && y < height && at(x, y) != 0;
    }
    size_t count() const {
        size_t n = 0;
        for (uint8_t v : data) n += (v != 0);
        return n;
    }
    bool same_size(int w, int h) const { return width == w && height == h; }
};

// 0 = background; positive labels are 8-connected components.
struct LabeledImage {
    int width = 0;
    int height = 0;
    std::vector<int32_t> labels;
    int count = 0;

    LabeledImage() = default;
    LabeledImage(int w, int h)
        : width(w), height(h), labels(static_cast<size_t>(w) * h, 0) {}

    int32_t& at(int x, int y) { return labels[static_cast<size_t>(y) * width + x]; }
    int32_t at(int x, int y) const { return labels[static_cast<size_t>(y) * width + x]; }
};

inline void require(bool cond, const std::string& msg) {
    if (!cond) throw std::runtime_error(msg);
}

// Standard hexcone RGB -> HSV. H in [0,1) with red at 0, green at 1/3,
// blue at 2/3; H = 0 for achromatic pixels.
inline void rgb_to_hsv(const RgbImage& img, ScalarImage& h, ScalarImage& s, ScalarImage& v) {
    require(img.width > 0 && img.height > 0, "rgb_to_hsv: empty image");
    h = ScalarImage(img.width, img.height);
    s = ScalarImage(img.width, img.height);
    v = ScalarImage(img.width, img.height);
    const size_t n = img.pixel_count();
    for (size_t i = 0; i < n; ++i) {
        const float r = img.data[3 * i + 0] / 255.f;
        const float g = img.data[3 * i + 1] / 255.f;
        const float b = img.data[3 * i + 2] / 255.f;
        const float mx = std::max(r, std::max(g, b));
        const float mn = std::min(r, std::min(g, b));
        const float d = mx - mn;
        v.data[i] = mx;
        s.data[i] = mx > 0.f ? d / mx : 0.f;
        float hue = 0.f;
        if (d > 0.f) {
            if (mx == r)
                hue = (g - b) / d;
            else if (mx == g)
                hue = 2.f + (b - r) / d;
            else
                hue = 4.f + (r - g) / d;
            hue /= 6.f;
            if (hue < 0.f) hue += 1.f;
            if (hue >= 1.f) hue -= 1.f;
        }
        h.data[i] = hue;
    }
}

// Inverse HSV -> 8-bit RGB (used by tests to round-trip primaries).
inline std::array<uint8_t, 3> hsv_to_rgb8(float h, float s, float v) {
    const float c = v * s;
    float hh = h * 6.f;
    const float x = c * (1.f - std::abs(hh - 2.f * std::floor(hh / 2.f) - 1.f));
    float r = 0, g = 0, b = 0;
    const int sector = static_cast<int>(hh) % 6;
    switch (sector) {
        case 0: r = c; g = x; break;
        case 1: r = x; g = c; break;
        case 2: g = c; b = x; break;
        case 3: g = x; b = c; break;
        case 4: r = x; b = c; break;
        default: r = c; b = x; break;
    }
    const float m = v - c;
    auto q = [m](float t) { return static_cast<uint8_t>(std::lround((t + m) * 255.f)); };
    return {q(r), q(g), q(b)};
}

inline BinaryMask threshold_binary(const ScalarImage& img, double t) {
    require(t >= 0.0 && t <= 1.0, "threshold_binary: t out of [0,1]");
    BinaryMask m(img.width, img.height);
    for (size_t i = 0; i < img.data.size(); ++i) m.data[i] = img.data[i] >= t ? 1 : 0;
    return m;
}

// Band threshold restricted to a ROI. low > high means a wrap-around band
// (img >= low OR img <= high), used for the red hue that straddles 0.
inline BinaryMask threshold_band(const ScalarImage& img, double low, double high,
                                 const BinaryMask& roi) {
    require(roi.same_size(img.width, img.height), "threshold_band: roi size mismatch");
    BinaryMask m(img.width, img.height);
    const bool wrap = low > high;
    for (size_t i = 0; i < img.data.size(); ++i) {
        if (!roi.data[i]) continue;
        const double v = img.data[i];
        const bool in = wrap ? (v >= low || v <= high) : (v >= low && v <= high);
        m.data[i] = in ? 1 : 0;
    }
    return m;
}

}  // namespace dotstereo
