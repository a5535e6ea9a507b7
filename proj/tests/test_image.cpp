#include "doctest.h"
#include "dotstereo/image.hpp"

using namespace dotstereo;

namespace {

RgbImage one_pixel(uint8_t r, uint8_t g, uint8_t b) {
    RgbImage img(1, 1);
    img.set(0, 0, r, g, b);
    return img;
}

}  // namespace

TEST_CASE("rgb_to_hsv primaries and achromatic") {
    ScalarImage h, s, v;

    rgb_to_hsv(one_pixel(255, 0, 0), h, s, v);
    CHECK(h.at(0, 0) == doctest::Approx(0.0).epsilon(1e-6));
    CHECK(s.at(0, 0) == doctest::Approx(1.0));
    CHECK(v.at(0, 0) == doctest::Approx(1.0));

    rgb_to_hsv(one_pixel(0, 255, 0), h, s, v);
    CHECK(h.at(0, 0) == doctest::Approx(1.0 / 3.0));
    CHECK(s.at(0, 0) == doctest::Approx(1.0));

    rgb_to_hsv(one_pixel(0, 0, 255), h, s, v);
    CHECK(h.at(0, 0) == doctest::Approx(2.0 / 3.0));

    rgb_to_hsv(one_pixel(128, 128, 128), h, s, v);
    CHECK(h.at(0, 0) == 0.0f);  // achromatic convention
    CHECK(s.at(0, 0) == 0.0f);
    CHECK(v.at(0, 0) == doctest::Approx(128.0 / 255.0));
}

TEST_CASE("hsv round-trips every 8-bit primary and secondary exactly") {
    const uint8_t triples[][3] = {{255, 0, 0},   {0, 255, 0},   {0, 0, 255},
                                  {255, 255, 0}, {0, 255, 255}, {255, 0, 255},
                                  {255, 255, 255}, {0, 0, 0},   {37, 200, 119}};
    for (const auto& t : triples) {
        ScalarImage h, s, v;
        rgb_to_hsv(one_pixel(t[0], t[1], t[2]), h, s, v);
        const auto back = hsv_to_rgb8(h.at(0, 0), s.at(0, 0), v.at(0, 0));
        CHECK(back[0] == t[0]);
        CHECK(back[1] == t[1]);
        CHECK(back[2] == t[2]);
    }
}

TEST_CASE("hsv ranges on random input") {
    RgbImage img(64, 64);
    uint32_t st = 12345;
    for (auto& b : img.data) st = st * 1664525u + 1013904223u, b = st >> 24;
    ScalarImage h, s, v;
    rgb_to_hsv(img, h, s, v);
    for (size_t i = 0; i < h.size(); ++i) {
        CHECK(h.data[i] >= 0.0f);
        CHECK(h.data[i] < 1.0f);
        CHECK(s.data[i] >= 0.0f);
        CHECK(s.data[i] <= 1.0f);
        CHECK(v.data[i] >= 0.0f);
        CHECK(v.data[i] <= 1.0f);
    }
}

TEST_CASE("threshold_binary inclusive boundary") {
    ScalarImage img(3, 1);
    img.at(0, 0) = 0.3f;
    img.at(1, 0) = 0.5f;
    img.at(2, 0) = 0.7f;
    const BinaryMask m = threshold_binary(img, 0.5);
    CHECK(m.at(0, 0) == 0);
    CHECK(m.at(1, 0) == 1);  // >= is inclusive
    CHECK(m.at(2, 0) == 1);

    CHECK(threshold_binary(ScalarImage(2, 2, 0.6f), 0.5).count() == 4);
    CHECK(threshold_binary(ScalarImage(2, 2, 0.4f), 0.5).count() == 0);
    CHECK_THROWS(threshold_binary(img, 1.5));
}

TEST_CASE("threshold_band plain, wrap, and roi restriction") {
    const ScalarImage green(4, 4, 1.f / 3.f);
    const BinaryMask all(4, 4, 1);
    CHECK(threshold_band(green, 0.25, 0.42, all).count() == 16);
    CHECK(threshold_band(green, 0.55, 0.75, all).count() == 0);

    const ScalarImage red(4, 4, 0.98f);
    CHECK(threshold_band(red, 0.92, 0.08, all).count() == 16);  // wrap band

    BinaryMask half(4, 4);
    for (int y = 0; y < 2; ++y)
        for (int x = 0; x < 4; ++x) half.at(x, y) = 1;
    CHECK(threshold_band(green, 0.25, 0.42, half).count() == 8);
}
