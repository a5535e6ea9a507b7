// Pattern extraction pipeline: RGB image -> ROI -> per-color class masks ->
// dot masks -> sub-pixel colored dots with block labels.
#pragma once

#include <array>
#include <cmath>
#include <optional>

#include "dotstereo/dotset.hpp"
#include "dotstereo/filters.hpp"
#include "dotstereo/image.hpp"
#include "dotstereo/sdd.hpp"

namespace dotstereo {

struct ExtractionConfig {
    SddParams sdd{};
    int closing_radius = 8;      // dot_pitch / 2: closes the ROI and block masks
    int opening_radius = 2;      // structuring disk for the V-channel opening
    int min_support = 10;        // min raw saturation-mask area under a detection
    bool use_box_filter = false; // box-filter path instead of the opening path
};

struct ColorBand {
    double low = 0;   // low > high encodes a wrap-around band
    double high = 0;
};

struct ExtractionArtifacts {
    BinaryMask roi;                          // R: closed + hole-filled
    std::array<BinaryMask, 3> class_masks;   // C_r, C_g, C_b (raw bands)
    std::array<BinaryMask, 3> closed_class_masks;  // closed C_c, block support
    std::array<BinaryMask, 3> dot_masks;     // D_r, D_g, D_b
    BinaryMask detect_mask;                  // D: all regional maxima in R
    ScalarImage vprime;                      // filtered V channel
    double t_s = 0;                          // S-channel threshold
    std::array<ColorBand, 3> bands;          // hue bands per color (r, g, b)
};

namespace detail {

struct RoiStages {
    BinaryMask raw;     // plain S >= T_s
    BinaryMask closed;  // closed + hole-filled
    double t_s = 0;
};

inline RoiStages roi_stages(const ScalarImage& s_chan, const ExtractionConfig& cfg) {
    const Histogram hist = histogram(s_chan);
    int nonzero = 0;
    for (auto b : hist.bins) nonzero += (b != 0);
    require(nonzero > 1, "ROI threshold not found");
    const SddResult res = sdd_analyze(hist, cfg.sdd);
    require(!res.valleys.empty(), "ROI threshold not found");
    RoiStages st;
    st.t_s = select_strongest_valley(res) / 255.0;
    st.raw = threshold_binary(s_chan, st.t_s);
    // Sensor noise around a dim background produces high-saturation specks a
    // few pixels wide; real dots are blobs dozens of pixels wide. Dropping the
    // tiny components keeps the closed ROI on the projected footprint instead
    // of bleeding over the whole frame.
    const LabeledImage cc = connected_components(st.raw);
    std::vector<int> area(cc.count, 0);
    for (int32_t l : cc.labels)
        if (l) ++area[l - 1];
    for (size_t i = 0; i < st.raw.data.size(); ++i)
        if (st.raw.data[i] && area[cc.labels[i] - 1] < cfg.min_support) st.raw.data[i] = 0;
    st.closed = fill_holes(binary_close(st.raw, cfg.closing_radius));
    return st;
}

// Hue histogram analysis on the half-turn-rotated axis so the red cluster
// (which straddles 0) sits mid-range. Returns per-color bands in the
// original hue coordinates; the red band comes out as a wrap band.
inline std::array<ColorBand, 3> hue_bands(const ScalarImage& h_chan, const BinaryMask& mask,
                                          const ExtractionConfig& cfg) {
    const Histogram plain = histogram(h_chan, &mask);
    Histogram rot;
    rot.total = plain.total;
    for (int b = 0; b < 256; ++b) rot.bins[(b + 128) % 256] = plain.bins[b];
    const SddResult res = sdd_analyze(rot, cfg.sdd);

    // Rotated targets: red 0 -> 128, green 85 -> 213, blue 170 -> 42.
    const int targets[3] = {128, 213, 42};
    std::array<int, 3> centers{};
    for (int c = 0; c < 3; ++c) {
        int best = -1;
        for (int p : res.peaks_of_hist)
            if (best < 0 || std::abs(p - targets[c]) < std::abs(best - targets[c])) best = p;
        require(best >= 0 && std::abs(best - targets[c]) <= 30, "hue clusters unresolved");
        centers[c] = best;
    }
    require(centers[0] != centers[1] && centers[1] != centers[2] && centers[0] != centers[2],
            "hue clusters unresolved");

    std::array<ColorBand, 3> bands;
    for (int c = 0; c < 3; ++c) {
        int lo = -1, hi = -1;
        for (int v : res.valleys) {
            if (v < centers[c] && (lo < 0 || v > lo)) lo = v;
            if (v > centers[c] && (hi < 0 || v < hi)) hi = v;
        }
        if (lo < 0) lo = centers[c] - 42;  // half the inter-primary spacing
        if (hi < 0) hi = centers[c] + 42;
        // Rotate back; a band crossing hue 0 becomes low > high (wrap).
        bands[c].low = ((lo - 128 + 256) % 256) / 255.0;
        bands[c].high = ((hi - 128 + 256) % 256) / 255.0;
    }
    return bands;
}

}  // namespace detail

// S-channel ROI: SDD threshold, then closing + hole filling so the mask
// covers the whole illuminated region rather than just the dots.
inline BinaryMask extract_roi(const RgbImage& img, const ExtractionConfig& cfg = {}) {
    ScalarImage h, s, v;
    rgb_to_hsv(img, h, s, v);
    return detail::roi_stages(s, cfg).closed;
}

// H-channel double thresholds per color; masks restricted to the ROI and to
// the raw saturation mask (low-S gap pixels have meaningless hue).
inline std::array<BinaryMask, 3> segment_color_blocks(const RgbImage& img, const BinaryMask& roi,
                                                      const ExtractionConfig& cfg = {}) {
    require(roi.count() > 0, "no pixels");
    ScalarImage h, s, v;
    rgb_to_hsv(img, h, s, v);
    const detail::RoiStages st = detail::roi_stages(s, cfg);
    BinaryMask support(roi.width, roi.height);
    for (size_t i = 0; i < support.data.size(); ++i)
        support.data[i] = (roi.data[i] && st.raw.data[i]) ? 1 : 0;
    const auto bands = detail::hue_bands(h, support, cfg);
    std::array<BinaryMask, 3> cls;
    for (int c = 0; c < 3; ++c) cls[c] = threshold_band(h, bands[c].low, bands[c].high, support);
    return cls;
}

// V-channel filtering and regional maxima; D_c = D AND C_c.
inline void detect_dots(const ScalarImage& v_chan, const BinaryMask& roi,
                        const std::array<BinaryMask, 3>& class_masks,
                        const ExtractionConfig& cfg, BinaryMask& d_all,
                        std::array<BinaryMask, 3>& d_color, ScalarImage& vprime) {
    vprime = cfg.use_box_filter ? box_filter(v_chan) : morph_open(v_chan, cfg.opening_radius);
    d_all = regional_maxima(vprime, roi);
    for (int c = 0; c < 3; ++c) {
        d_color[c] = BinaryMask(roi.width, roi.height);
        for (size_t i = 0; i < d_all.data.size(); ++i)
            d_color[c].data[i] = (d_all.data[i] && class_masks[c].data[i]) ? 1 : 0;
    }
}

// Full pipeline. Block label of a dot = label of the morphologically closed
// class-mask component at (or within 2 px of) its rounded centroid; dots
// with no component nearby are dropped.
inline std::pair<DotSet, ExtractionArtifacts> extract(const RgbImage& img,
                                                      const ExtractionConfig& cfg = {},
                                                      const std::string& source = "left") {
    ScalarImage h, s, v;
    rgb_to_hsv(img, h, s, v);
    const detail::RoiStages st = detail::roi_stages(s, cfg);

    ExtractionArtifacts art;
    art.roi = st.closed;
    art.t_s = st.t_s;

    BinaryMask support(img.width, img.height);
    for (size_t i = 0; i < support.data.size(); ++i)
        support.data[i] = (st.closed.data[i] && st.raw.data[i]) ? 1 : 0;
    art.bands = detail::hue_bands(h, support, cfg);
    for (int c = 0; c < 3; ++c)
        art.class_masks[c] = threshold_band(h, art.bands[c].low, art.bands[c].high, support);

    detect_dots(v, art.roi, art.class_masks, cfg, art.detect_mask, art.dot_masks, art.vprime);

    // Sensor noise leaves stray saturated specks whose V' happens to be a
    // regional maximum; real dots rest on saturated blobs dozens of pixels
    // wide. Detections whose saturation component is tiny are discarded.
    const LabeledImage raw_cc = connected_components(st.raw);
    std::vector<int> raw_area(raw_cc.count, 0);
    for (int32_t l : raw_cc.labels)
        if (l) ++raw_area[l - 1];

    DotSet set;
    set.source = source;
    set.width = img.width;
    set.height = img.height;
    constexpr DotColor colors[3] = {DotColor::Red, DotColor::Green, DotColor::Blue};
    for (int c = 0; c < 3; ++c) {
        art.closed_class_masks[c] = binary_close(art.class_masks[c], cfg.closing_radius);
        const LabeledImage blocks = connected_components(art.closed_class_masks[c]);
        const LabeledImage lab = connected_components(art.dot_masks[c]);
        std::vector<double> sx(lab.count, 0), sy(lab.count, 0);
        std::vector<long long> n(lab.count, 0);
        std::vector<int> support(lab.count, 0);
        for (int y = 0; y < lab.height; ++y)
            for (int x = 0; x < lab.width; ++x)
                if (art.dot_masks[c].at(x, y) && lab.at(x, y)) {
                    const int k = lab.at(x, y) - 1;
                    sx[k] += x;
                    sy[k] += y;
                    ++n[k];
                    if (raw_cc.at(x, y))
                        support[k] = std::max(support[k], raw_area[raw_cc.at(x, y) - 1]);
                }
        std::vector<std::pair<double, double>> centroids;
        for (int k = 0; k < lab.count; ++k)
            if (n[k] && support[k] >= cfg.min_support)
                centroids.emplace_back(sx[k] / n[k], sy[k] / n[k]);
        for (auto [cx, cy] : centroids) {
            const int ix = static_cast<int>(std::lround(cx));
            const int iy = static_cast<int>(std::lround(cy));
            int block = 0;
            double best = 1e9;
            for (int dy = -2; dy <= 2; ++dy)
                for (int dx = -2; dx <= 2; ++dx) {
                    const int x = ix + dx, y = iy + dy;
                    if (x < 0 || x >= img.width || y < 0 || y >= img.height) continue;
                    const int32_t l = blocks.at(x, y);
                    const double d = dx * dx + dy * dy;
                    if (l && d < best) {
                        best = d;
                        block = l;
                    }
                }
            if (!block) continue;
            set.dots.push_back({cx, cy, colors[c], block});
        }
    }
    return {std::move(set), std::move(art)};
}

}  // namespace dotstereo
