#include <cmath>
#include <map>
#include <set>

#include "doctest.h"
#include "dotstereo/extraction.hpp"
#include "dotstereo/pattern.hpp"

using namespace dotstereo;

namespace {

PatternSpec small_spec() {
    PatternSpec s;
    s.width = 512;
    s.height = 512;
    s.background = 20;  // faint ambient level, as in the synthetic renders
    return s;
}

// Match each extracted dot to the nearest ground-truth dot within 2 px.
struct MatchStats {
    double rms = 0;
    double max_err = 0;
    int matched = 0;
    int color_errors = 0;
};

MatchStats match_to_truth(const DotSet& got, const DotSet& truth) {
    MatchStats st;
    double sq = 0;
    for (const Dot& d : got.dots) {
        const Dot* best = nullptr;
        double bd = 4.0;  // 2 px squared
        for (const Dot& t : truth.dots) {
            const double dd = (d.x - t.x) * (d.x - t.x) + (d.y - t.y) * (d.y - t.y);
            if (dd < bd) {
                bd = dd;
                best = &t;
            }
        }
        if (!best) continue;
        ++st.matched;
        sq += bd;
        st.max_err = std::max(st.max_err, std::sqrt(bd));
        st.color_errors += best->color != d.color;
    }
    st.rms = st.matched ? std::sqrt(sq / st.matched) : 0;
    return st;
}

void check_nesting(const ExtractionArtifacts& art) {
    for (int c = 0; c < 3; ++c)
        for (size_t i = 0; i < art.roi.data.size(); ++i) {
            if (art.dot_masks[c].data[i]) REQUIRE(art.class_masks[c].data[i]);
            if (art.class_masks[c].data[i]) REQUIRE(art.roi.data[i]);
        }
}

}  // namespace

TEST_CASE("extract recovers every pattern dot with sub-pixel accuracy") {
    const PatternSpec spec = small_spec();
    const RgbImage img = generate_pattern(spec);
    const DotSet truth = pattern_ground_truth(spec);
    const auto [set, art] = extract(img);

    CHECK(set.dots.size() == truth.dots.size());
    const MatchStats st = match_to_truth(set, truth);
    CHECK(st.matched == static_cast<int>(set.dots.size()));
    CHECK(st.rms < 0.3);
    CHECK(st.max_err < 0.5);
    CHECK(st.color_errors == 0);
    check_nesting(art);

    // ROI must cover every dot center.
    for (const Dot& t : truth.dots)
        CHECK(art.roi.at(static_cast<int>(std::lround(t.x)),
                         static_cast<int>(std::lround(t.y))) == 1);
}

TEST_CASE("green blocks contain 16 dots each, blue blocks 4") {
    const auto [set, art] = extract(generate_pattern(small_spec()));
    std::map<int, int> greens, blues;
    for (const Dot& d : set.dots) {
        if (d.color == DotColor::Green) ++greens[d.block];
        if (d.color == DotColor::Blue) ++blues[d.block];
    }
    CHECK(greens.size() == 16);
    for (auto [b, n] : greens) CHECK(n == 16);
    CHECK(blues.size() == 16);
    for (auto [b, n] : blues) CHECK(n == 4);
}

TEST_CASE("extraction is deterministic") {
    const RgbImage img = generate_pattern(small_spec());
    const auto [a, arta] = extract(img);
    const auto [b, artb] = extract(img);
    REQUIRE(a.dots.size() == b.dots.size());
    for (size_t i = 0; i < a.dots.size(); ++i) {
        CHECK(a.dots[i].x == b.dots[i].x);
        CHECK(a.dots[i].y == b.dots[i].y);
        CHECK(a.dots[i].color == b.dots[i].color);
        CHECK(a.dots[i].block == b.dots[i].block);
    }
}

TEST_CASE("mirror-flipped input gives a mirror-flipped dot set") {
    const RgbImage img = generate_pattern(small_spec());
    RgbImage flipped(img.width, img.height);
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x) {
            const uint8_t* p = img.px(img.width - 1 - x, y);
            flipped.set(x, y, p[0], p[1], p[2]);
        }
    const auto [a, arta] = extract(img);
    const auto [b, artb] = extract(flipped);
    REQUIRE(a.dots.size() == b.dots.size());
    // Compare as sets of (x, y, color) since enumeration order differs.
    std::set<std::tuple<long, long, int>> sa, sb;
    for (const Dot& d : a.dots)
        sa.insert({std::lround(d.x * 64), std::lround(d.y * 64), static_cast<int>(d.color)});
    for (const Dot& d : b.dots)
        sb.insert({std::lround((img.width - 1 - d.x) * 64), std::lround(d.y * 64),
                   static_cast<int>(d.color)});
    CHECK(sa == sb);
}

TEST_CASE("dot count is stable under illumination scaling") {
    const RgbImage img = generate_pattern(small_spec());
    RgbImage dim = img;
    for (auto& v : dim.data) v = static_cast<uint8_t>(v * 0.8);
    const auto [a, arta] = extract(img);
    const auto [b, artb] = extract(dim);
    const double rel = std::abs(double(a.dots.size()) - double(b.dots.size())) /
                       double(a.dots.size());
    CHECK(rel < 0.01);
}

TEST_CASE("degenerate inputs are rejected") {
    RgbImage black(64, 64);
    CHECK_THROWS(extract_roi(black));

    RgbImage sat(64, 64);
    for (size_t i = 0; i < sat.pixel_count(); ++i) sat.data[3 * i] = 255;  // pure red
    CHECK_THROWS_WITH(extract_roi(sat), "ROI threshold not found");

    // Red dots only: hue clusters for green/blue cannot be resolved.
    RgbImage redonly(256, 256);
    for (int j = 0; j < 16; ++j)
        for (int i = 0; i < 16; ++i)
            render_dot(redonly, i * 16 + 7.5, j * 16 + 7.5, 5, DotColor::Red);
    CHECK_THROWS_WITH((void)extract(redonly), "hue clusters unresolved");

    const BinaryMask empty(64, 64);
    CHECK_THROWS_WITH((void)segment_color_blocks(generate_pattern(small_spec()), empty),
                      "no pixels");
}

TEST_CASE("box-filter path also finds every dot") {
    const PatternSpec spec = small_spec();
    ExtractionConfig cfg;
    cfg.use_box_filter = true;
    const auto [set, art] = extract(generate_pattern(spec), cfg);
    const DotSet truth = pattern_ground_truth(spec);
    const MatchStats st = match_to_truth(set, truth);
    CHECK(set.dots.size() == truth.dots.size());
    CHECK(st.matched == static_cast<int>(set.dots.size()));
}
