// Sub-pixel dot records shared by pattern generation, extraction and matching.
#pragma once

#include <string>
#include <vector>

#include "dotstereo/image.hpp"

namespace dotstereo {

enum class DotColor { Red, Green, Blue };

inline const char* to_string(DotColor c) {
    switch (c) {
        case DotColor::Red: return "red";
        case DotColor::Green: return "green";
        default: return "blue";
    }
}

inline DotColor dot_color_from_string(const std::string& s) {
    if (s == "red") return DotColor::Red;
    if (s == "green") return DotColor::Green;
    require(s == "blue", "unknown dot color: " + s);
    return DotColor::Blue;
}

struct Dot {
    double x = 0;      // sub-pixel column
    double y = 0;      // sub-pixel row
    DotColor color = DotColor::Red;
    int block = 1;     // component label within the color class, >= 1
};

struct DotSet {
    std::string source;  // view tag: "left" | "right" (or "pattern")
    int width = 0;
    int height = 0;
    std::vector<Dot> dots;
};

struct CorrespondencePair {
    int left = -1;   // index into CorrespondenceSet::left.dots
    int right = -1;  // index into CorrespondenceSet::right.dots
    DotColor color = DotColor::Red;
};

struct CorrespondenceSet {
    DotSet left, right;
    std::vector<CorrespondencePair> pairs;
};

}  // namespace dotstereo
