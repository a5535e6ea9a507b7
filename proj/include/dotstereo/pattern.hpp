// Designed RGB dot pattern: a dot lattice where periodic green and blue
// blocks sit as islands inside a connected sea of red dots.
#pragma once

#include <cmath>

#include "dotstereo/dotset.hpp"
#include "dotstereo/image.hpp"

namespace dotstereo {

struct PatternSpec {
    int width = 2048;
    int height = 1536;
    int dot_pitch = 16;   // px between dot centers
    int dot_radius = 5;   // px
    int green_block = 4;  // dots per side of each green block
    int blue_block = 2;   // dots per side of each blue block
    int tile_period = 1;  // green/blue block pairs per super-tile side
    int background = 0;   // 8-bit gray level

    // Dots per side of the super-tile.
    int tile() const { return 2 * green_block * tile_period; }

    void validate() const {
        require(width > 0 && height > 0, "pattern: empty canvas");
        require(dot_pitch >= 2, "pattern: dot_pitch too small");
        require(dot_radius >= 1, "pattern: dot_radius must be >= 1");
        require(2 * dot_radius < dot_pitch, "pattern: dots touch (dot_radius >= dot_pitch/2)");
        require(green_block > blue_block && blue_block >= 1,
                "pattern: need green_block > blue_block >= 1");
        require(tile_period >= 1, "pattern: tile_period must be >= 1");
        require(background >= 0 && background <= 255, "pattern: background out of [0,255]");
        // Green sits at tile offset 1, blue right after it; both need a full
        // red ring before the pattern repeats.
        require(green_block + blue_block + 2 <= tile(), "blocks not red-separated");
        require(width / dot_pitch >= tile() && height / dot_pitch >= tile(),
                "pattern: canvas smaller than one super-tile");
    }
};

namespace detail {

// Color of lattice dot (i, j) by its position inside the super-tile.
inline DotColor dot_color(const PatternSpec& s, int i, int j) {
    const int t = s.tile();
    const int ti = i % t, tj = j % t;
    const auto in = [](int v, int lo, int n) { return v >= lo && v < lo + n; };
    if (in(ti, 1, s.green_block) && in(tj, 1, s.green_block)) return DotColor::Green;
    const int b0 = s.green_block + 2;
    if (in(ti, b0, s.blue_block) && in(tj, b0, s.blue_block)) return DotColor::Blue;
    return DotColor::Red;
}

// Pixel coverage of a disk, 8x8 supersampled; sample points at pixel centers
// offset by (k+0.5)/8 - 0.5.
inline double disk_coverage(double px, double py, double cx, double cy, double r) {
    constexpr int ss = 8;
    int hit = 0;
    for (int sy = 0; sy < ss; ++sy)
        for (int sx = 0; sx < ss; ++sx) {
            const double dx = px + (sx + 0.5) / ss - 0.5 - cx;
            const double dy = py + (sy + 0.5) / ss - 0.5 - cy;
            hit += (dx * dx + dy * dy <= r * r);
        }
    return hit / double(ss * ss);
}

}  // namespace detail

// Anti-aliased disk in one of the three pure hues, alpha-blended over the
// existing image content.
inline void render_dot(RgbImage& img, double cx, double cy, double radius, DotColor color) {
    const int x0 = std::max(0, static_cast<int>(std::floor(cx - radius - 1)));
    const int x1 = std::min(img.width - 1, static_cast<int>(std::ceil(cx + radius + 1)));
    const int y0 = std::max(0, static_cast<int>(std::floor(cy - radius - 1)));
    const int y1 = std::min(img.height - 1, static_cast<int>(std::ceil(cy + radius + 1)));
    const int ch = color == DotColor::Red ? 0 : color == DotColor::Green ? 1 : 2;
    for (int y = y0; y <= y1; ++y)
        for (int x = x0; x <= x1; ++x) {
            const double a = detail::disk_coverage(x, y, cx, cy, radius);
            if (a <= 0) continue;
            uint8_t* p = img.px(x, y);
            for (int c = 0; c < 3; ++c) {
                const double target = c == ch ? 255.0 : 0.0;
                p[c] = static_cast<uint8_t>(std::lround(p[c] * (1.0 - a) + target * a));
            }
        }
}

inline RgbImage generate_pattern(const PatternSpec& spec) {
    spec.validate();
    RgbImage img(spec.width, spec.height);
    const uint8_t bg = static_cast<uint8_t>(spec.background);
    for (auto& v : img.data) v = bg;
    const int nx = spec.width / spec.dot_pitch, ny = spec.height / spec.dot_pitch;
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            const double cx = (i + 0.5) * spec.dot_pitch - 0.5;
            const double cy = (j + 0.5) * spec.dot_pitch - 0.5;
            render_dot(img, cx, cy, spec.dot_radius, detail::dot_color(spec, i, j));
        }
    return img;
}

// Exact centers, colors and block memberships as laid out by the generator.
// Red dots all belong to block 1 (the red lattice is one connected region);
// green and blue blocks are numbered in tile raster order.
inline DotSet pattern_ground_truth(const PatternSpec& spec) {
    spec.validate();
    DotSet out;
    out.source = "pattern";
    out.width = spec.width;
    out.height = spec.height;
    const int nx = spec.width / spec.dot_pitch, ny = spec.height / spec.dot_pitch;
    const int t = spec.tile();
    const int tiles_x = (nx + t - 1) / t;
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            Dot d;
            d.x = (i + 0.5) * spec.dot_pitch - 0.5;
            d.y = (j + 0.5) * spec.dot_pitch - 0.5;
            d.color = detail::dot_color(spec, i, j);
            d.block = d.color == DotColor::Red ? 1 : (j / t) * tiles_x + (i / t) + 1;
            out.dots.push_back(d);
        }
    return out;
}

}  // namespace dotstereo
