#include <cmath>
#include <map>

#include "doctest.h"
#include "dotstereo/extraction.hpp"
#include "dotstereo/pattern.hpp"

using namespace dotstereo;

namespace {

PatternSpec small_spec() {
    PatternSpec s;
    s.width = 512;
    s.height = 512;
    return s;
}

}  // namespace

TEST_CASE("generation is deterministic") {
    const PatternSpec s = small_spec();
    const RgbImage a = generate_pattern(s);
    const RgbImage b = generate_pattern(s);
    CHECK(a.data == b.data);
}

TEST_CASE("invalid specs are rejected") {
    PatternSpec s = small_spec();
    s.dot_radius = 0;
    CHECK_THROWS(generate_pattern(s));

    s = small_spec();
    s.dot_radius = 8;  // touches at pitch 16
    CHECK_THROWS(generate_pattern(s));

    s = small_spec();
    s.blue_block = 3;  // 4+3+2 > tile of 8: no red ring left
    CHECK_THROWS_WITH(generate_pattern(s), "blocks not red-separated");

    s = small_spec();
    s.width = 100;  // smaller than one super-tile (8 * 16 px)
    CHECK_THROWS(generate_pattern(s));
}

TEST_CASE("every non-background pixel has a pure primary hue") {
    PatternSpec s = small_spec();
    s.background = 20;
    const RgbImage img = generate_pattern(s);
    ScalarImage h, sv, v;
    rgb_to_hsv(img, h, sv, v);
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x) {
            if (sv.at(x, y) < 0.1f) continue;  // background / faint rim
            const float hue = h.at(x, y);
            const float d = std::min({std::abs(hue - 0.f), std::abs(hue - 1.f / 3.f),
                                      std::abs(hue - 2.f / 3.f), std::abs(hue - 1.f)});
            CHECK(d < 0.02f);
        }
}

TEST_CASE("green and blue blocks are pairwise non-adjacent") {
    const RgbImage img = generate_pattern(small_spec());
    BinaryMask green(img.width, img.height), blue(img.width, img.height);
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x) {
            const uint8_t* p = img.px(x, y);
            if (p[1] > 128 && p[0] < 64 && p[2] < 64) green.at(x, y) = 1;
            if (p[2] > 128 && p[0] < 64 && p[1] < 64) blue.at(x, y) = 1;
        }
    // A union must have as many components as the two masks separately:
    // merging would mean some green and blue block touch.
    BinaryMask both(img.width, img.height);
    for (size_t i = 0; i < both.data.size(); ++i)
        both.data[i] = (green.data[i] || blue.data[i]) ? 1 : 0;
    const int ng = connected_components(green).count;
    const int nb = connected_components(blue).count;
    CHECK(connected_components(both).count == ng + nb);
    // Dots are disjoint disks, so pixel components count dots: 16 blocks of
    // 4x4 green dots and 16 blocks of 2x2 blue dots.
    CHECK(ng == 256);
    CHECK(nb == 64);
}

TEST_CASE("red lattice dilated by one pitch is a single connected region") {
    const PatternSpec s = small_spec();
    const DotSet gt = pattern_ground_truth(s);
    BinaryMask red(s.width, s.height);
    for (const Dot& d : gt.dots)
        if (d.color == DotColor::Red)
            red.at(static_cast<int>(d.x), static_cast<int>(d.y)) = 1;
    const BinaryMask grown = binary_dilate(red, s.dot_pitch);
    CHECK(connected_components(grown).count == 1);
}

TEST_CASE("ground truth covers every lattice point with matching colors") {
    const PatternSpec s = small_spec();
    const DotSet gt = pattern_ground_truth(s);
    CHECK(gt.dots.size() == 32u * 32u);  // 512/16 per side

    int greens = 0, blues = 0;
    for (const Dot& d : gt.dots) {
        greens += d.color == DotColor::Green;
        blues += d.color == DotColor::Blue;
    }
    CHECK(greens == 16 * 16);  // 16 blocks of 4x4
    CHECK(blues == 16 * 4);    // 16 blocks of 2x2

    // The rendered image at each ground-truth center shows that color.
    const RgbImage img = generate_pattern(s);
    for (const Dot& d : gt.dots) {
        const uint8_t* p = img.px(static_cast<int>(std::lround(d.x)),
                                  static_cast<int>(std::lround(d.y)));
        const int ch = d.color == DotColor::Red ? 0 : d.color == DotColor::Green ? 1 : 2;
        CHECK(p[ch] == 255);
    }
}

TEST_CASE("green block labels partition green dots into 4x4 groups") {
    const DotSet gt = pattern_ground_truth(small_spec());
    std::map<int, int> per_block;
    for (const Dot& d : gt.dots)
        if (d.color == DotColor::Green) ++per_block[d.block];
    CHECK(per_block.size() == 16);
    for (auto [block, n] : per_block) CHECK(n == 16);
}
