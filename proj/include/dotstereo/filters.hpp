// Linear and morphological filtering, regional maxima, connected components.
#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "dotstereo/image.hpp"

namespace dotstereo {

struct Histogram {
    std::array<uint64_t, 256> bins{};
    uint64_t total = 0;
};

// bin = floor(v * 255 + 0.5)
inline int quantize_bin(double v) {
    int b = static_cast<int>(std::floor(v * 255.0 + 0.5));
    if (b < 0) b = 0;
    if (b > 255) b = 255;
    return b;
}

inline Histogram histogram(const ScalarImage& img, const BinaryMask* mask = nullptr) {
    if (mask) require(mask->same_size(img.width, img.height), "histogram: mask size mismatch");
    Histogram h;
    for (size_t i = 0; i < img.data.size(); ++i) {
        if (mask && !mask->data[i]) continue;
        ++h.bins[quantize_bin(img.data[i])];
        ++h.total;
    }
    require(h.total > 0, "no pixels");
    return h;
}

// 5x5 mean filter with replicate padding (separable).
inline ScalarImage box_filter(const ScalarImage& img) {
    require(img.width >= 5 && img.height >= 5, "box_filter: image smaller than kernel");
    ScalarImage tmp(img.width, img.height), out(img.width, img.height);
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x) {
            float s = 0;
            for (int dx = -2; dx <= 2; ++dx) s += img.at_clamped(x + dx, y);
            tmp.at(x, y) = s / 5.f;
        }
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x) {
            float s = 0;
            for (int dy = -2; dy <= 2; ++dy) s += tmp.at_clamped(x, y + dy);
            out.at(x, y) = s / 5.f;
        }
    return out;
}

// Discrete disk offsets. Radius 1 is the 4-connected cross; larger radii use
// dx^2 + dy^2 <= r^2 + r/2 which fills in the ragged rim of the pure
// Euclidean disk (r = 2 gives the 21-pixel disk).
inline std::vector<std::pair<int, int>> disk_offsets(int radius) {
    require(radius >= 1, "disk radius must be >= 1");
    std::vector<std::pair<int, int>> off;
    const double r2 = radius == 1 ? 1.0 : radius * radius + radius * 0.5;
    for (int dy = -radius; dy <= radius; ++dy)
        for (int dx = -radius; dx <= radius; ++dx)
            if (dx * dx + dy * dy <= r2) off.emplace_back(dx, dy);
    return off;
}

namespace detail {

enum class MorphOp { Erode, Dilate };

inline ScalarImage morph_gray(const ScalarImage& img,
                              const std::vector<std::pair<int, int>>& off, MorphOp op) {
    ScalarImage out(img.width, img.height);
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x) {
            float v = op == MorphOp::Erode ? 2.f : -2.f;
            for (auto [dx, dy] : off) {
                const float u = img.at_clamped(x + dx, y + dy);
                v = op == MorphOp::Erode ? std::min(v, u) : std::max(v, u);
            }
            out.at(x, y) = v;
        }
    return out;
}

inline BinaryMask morph_binary(const BinaryMask& m,
                               const std::vector<std::pair<int, int>>& off, MorphOp op) {
    BinaryMask out(m.width, m.height);
    for (int y = 0; y < m.height; ++y)
        for (int x = 0; x < m.width; ++x) {
            bool v = op == MorphOp::Erode;
            for (auto [dx, dy] : off) {
                int xx = std::clamp(x + dx, 0, m.width - 1);
                int yy = std::clamp(y + dy, 0, m.height - 1);
                const bool u = m.at(xx, yy) != 0;
                v = op == MorphOp::Erode ? (v && u) : (v || u);
                if (v == (op == MorphOp::Dilate)) break;
            }
            out.at(x, y) = v ? 1 : 0;
        }
    return out;
}

}  // namespace detail

// Grayscale opening: erosion then dilation with the radius-r discrete disk.
inline ScalarImage morph_open(const ScalarImage& img, int radius) {
    const auto off = disk_offsets(radius);
    return detail::morph_gray(detail::morph_gray(img, off, detail::MorphOp::Erode), off,
                              detail::MorphOp::Dilate);
}

inline BinaryMask binary_dilate(const BinaryMask& m, int radius) {
    return detail::morph_binary(m, disk_offsets(radius), detail::MorphOp::Dilate);
}

inline BinaryMask binary_close(const BinaryMask& m, int radius) {
    const auto off = disk_offsets(radius);
    return detail::morph_binary(detail::morph_binary(m, off, detail::MorphOp::Dilate), off,
                                detail::MorphOp::Erode);
}

// Fill background regions not connected (4-connectivity) to the image border.
inline BinaryMask fill_holes(const BinaryMask& m) {
    BinaryMask outside(m.width, m.height);
    std::vector<std::pair<int, int>> stack;
    auto push = [&](int x, int y) {
        if (x < 0 || x >= m.width || y < 0 || y >= m.height) return;
        if (m.at(x, y) || outside.at(x, y)) return;
        outside.at(x, y) = 1;
        stack.emplace_back(x, y);
    };
    for (int x = 0; x < m.width; ++x) {
        push(x, 0);
        push(x, m.height - 1);
    }
    for (int y = 0; y < m.height; ++y) {
        push(0, y);
        push(m.width - 1, y);
    }
    while (!stack.empty()) {
        auto [x, y] = stack.back();
        stack.pop_back();
        push(x - 1, y);
        push(x + 1, y);
        push(x, y - 1);
        push(x, y + 1);
    }
    BinaryMask out(m.width, m.height);
    for (size_t i = 0; i < out.data.size(); ++i) out.data[i] = (m.data[i] || !outside.data[i]) ? 1 : 0;
    return out;
}

// Marks 8-connected equal-value plateaus inside roi whose every neighbor
// (within roi, outside the plateau) is strictly smaller.
inline BinaryMask regional_maxima(const ScalarImage& img, const BinaryMask& roi) {
    require(roi.same_size(img.width, img.height), "regional_maxima: roi size mismatch");
    BinaryMask out(img.width, img.height);
    std::vector<uint8_t> visited(img.size(), 0);
    std::vector<size_t> plateau, stack;
    const int w = img.width, h = img.height;
    for (int y0 = 0; y0 < h; ++y0)
        for (int x0 = 0; x0 < w; ++x0) {
            const size_t i0 = static_cast<size_t>(y0) * w + x0;
            if (!roi.data[i0] || visited[i0]) continue;
            const float v = img.data[i0];
            bool is_max = true;
            plateau.clear();
            stack.assign(1, i0);
            visited[i0] = 1;
            while (!stack.empty()) {
                const size_t i = stack.back();
                stack.pop_back();
                plateau.push_back(i);
                const int x = static_cast<int>(i % w), y = static_cast<int>(i / w);
                for (int dy = -1; dy <= 1; ++dy)
                    for (int dx = -1; dx <= 1; ++dx) {
                        if (!dx && !dy) continue;
                        const int xx = x + dx, yy = y + dy;
                        if (xx < 0 || xx >= w || yy < 0 || yy >= h) continue;
                        const size_t j = static_cast<size_t>(yy) * w + xx;
                        if (!roi.data[j]) continue;
                        const float u = img.data[j];
                        if (u > v) {
                            is_max = false;
                        } else if (u == v && !visited[j]) {
                            visited[j] = 1;
                            stack.push_back(j);
                        }
                    }
            }
            if (is_max)
                for (size_t i : plateau) out.data[i] = 1;
        }
    return out;
}

// 8-connected labeling, labels assigned in raster-scan first-encounter order.
inline LabeledImage connected_components(const BinaryMask& mask) {
    LabeledImage lab(mask.width, mask.height);
    const int w = mask.width, h = mask.height;
    std::vector<size_t> stack;
    for (int y0 = 0; y0 < h; ++y0)
        for (int x0 = 0; x0 < w; ++x0) {
            const size_t i0 = static_cast<size_t>(y0) * w + x0;
            if (!mask.data[i0] || lab.labels[i0]) continue;
            const int32_t id = ++lab.count;
            lab.labels[i0] = id;
            stack.assign(1, i0);
            while (!stack.empty()) {
                const size_t i = stack.back();
                stack.pop_back();
                const int x = static_cast<int>(i % w), y = static_cast<int>(i / w);
                for (int dy = -1; dy <= 1; ++dy)
                    for (int dx = -1; dx <= 1; ++dx) {
                        const int xx = x + dx, yy = y + dy;
                        if (xx < 0 || xx >= w || yy < 0 || yy >= h) continue;
                        const size_t j = static_cast<size_t>(yy) * w + xx;
                        if (mask.data[j] && !lab.labels[j]) {
                            lab.labels[j] = id;
                            stack.push_back(j);
                        }
                    }
            }
        }
    return lab;
}

// Arithmetic mean of member pixel coordinates per label (x along columns).
inline std::vector<std::pair<double, double>> component_centroids(const LabeledImage& lab) {
    std::vector<double> sx(lab.count, 0), sy(lab.count, 0);
    std::vector<uint64_t> n(lab.count, 0);
    for (int y = 0; y < lab.height; ++y)
        for (int x = 0; x < lab.width; ++x) {
            const int32_t id = lab.at(x, y);
            if (!id) continue;
            sx[id - 1] += x;
            sy[id - 1] += y;
            ++n[id - 1];
        }
    std::vector<std::pair<double, double>> out(lab.count);
    for (int k = 0; k < lab.count; ++k) out[k] = {sx[k] / n[k], sy[k] / n[k]};
    return out;
}

// Separable Gaussian blur (synthetic optics model; kernel truncated at 3 sigma).
inline ScalarImage gaussian_blur(const ScalarImage& img, double sigma) {
    if (sigma <= 0) return img;
    const int r = std::max(1, static_cast<int>(std::ceil(3 * sigma)));
    std::vector<float> k(2 * r + 1);
    float sum = 0;
    for (int i = -r; i <= r; ++i) sum += k[i + r] = std::exp(-0.5 * i * i / (sigma * sigma));
    for (auto& v : k) v /= sum;
    ScalarImage tmp(img.width, img.height), out(img.width, img.height);
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x) {
            float s = 0;
            for (int i = -r; i <= r; ++i) s += k[i + r] * img.at_clamped(x + i, y);
            tmp.at(x, y) = s;
        }
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x) {
            float s = 0;
            for (int i = -r; i <= r; ++i) s += k[i + r] * tmp.at_clamped(x, y + i);
            out.at(x, y) = s;
        }
    return out;
}

}  // namespace dotstereo
