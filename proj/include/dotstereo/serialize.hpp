// JSON / CSV / PLY serialization for every pipeline artifact, plus the
// atomic-write helper used by the CLI (temp file + rename).
#pragma once

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "dotstereo/geometry.hpp"
#include "dotstereo/pattern.hpp"
#include "dotstereo/pipeline.hpp"
#include "dotstereo/synth.hpp"
#include "json.hpp"

namespace dotstereo {

using Json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Atomic file writes: content lands under the final name only when complete.

inline void write_text_atomic(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        require(out.good(), tmp + ": cannot open for writing");
        out << content;
        require(out.good(), tmp + ": write failed");
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    require(!ec, path + ": rename failed: " + ec.message());
}

inline std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    require(in.good(), path + ": cannot open");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

namespace detail {

inline Json parse_json(const std::string& text, const std::string& what) {
    Json j = Json::parse(text, nullptr, false);
    require(!j.is_discarded(), what + ": malformed JSON");
    return j;
}

template <typename T>
T get_field(const Json& j, const std::string& key, const std::string& what) {
    require(j.is_object() && j.contains(key), what + ": missing key \"" + key + "\"");
    try {
        return j.at(key).get<T>();
    } catch (const Json::exception&) {
        throw std::runtime_error(what + ": bad value for key \"" + key + "\"");
    }
}

template <typename T>
T get_field_or(const Json& j, const std::string& key, const T& fallback,
               const std::string& what) {
    if (!j.is_object() || !j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const Json::exception&) {
        throw std::runtime_error(what + ": bad value for key \"" + key + "\"");
    }
}

inline Json vec3_json(const Vec3& v) { return Json::array({v.x, v.y, v.z}); }

inline Vec3 vec3_from(const Json& j, const std::string& what) {
    require(j.is_array() && j.size() == 3, what + ": expected a 3-element array");
    return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

}  // namespace detail

// ---------------------------------------------------------------------------
// PatternSpec: flat key/value document, keys exactly as the field names.

inline Json to_json(const PatternSpec& s) {
    Json j;
    j["width"] = s.width;
    j["height"] = s.height;
    j["dot_pitch"] = s.dot_pitch;
    j["dot_radius"] = s.dot_radius;
    j["green_block"] = s.green_block;
    j["blue_block"] = s.blue_block;
    j["tile_period"] = s.tile_period;
    j["background"] = s.background;
    return j;
}

inline PatternSpec pattern_spec_from_json(const Json& j) {
    const std::string what = "pattern spec";
    PatternSpec s;
    s.width = detail::get_field_or(j, "width", s.width, what);
    s.height = detail::get_field_or(j, "height", s.height, what);
    s.dot_pitch = detail::get_field_or(j, "dot_pitch", s.dot_pitch, what);
    s.dot_radius = detail::get_field_or(j, "dot_radius", s.dot_radius, what);
    s.green_block = detail::get_field_or(j, "green_block", s.green_block, what);
    s.blue_block = detail::get_field_or(j, "blue_block", s.blue_block, what);
    s.tile_period = detail::get_field_or(j, "tile_period", s.tile_period, what);
    s.background = detail::get_field_or(j, "background", s.background, what);
    s.validate();
    return s;
}

// ---------------------------------------------------------------------------
// DotSet.

inline Json to_json(const DotSet& set) {
    Json j;
    j["source"] = set.source;
    j["width"] = set.width;
    j["height"] = set.height;
    Json dots = Json::array();
    for (const Dot& d : set.dots) {
        Json e;
        e["x"] = d.x;
        e["y"] = d.y;
        e["color"] = to_string(d.color);
        e["block"] = d.block;
        dots.push_back(std::move(e));
    }
    j["dots"] = std::move(dots);
    return j;
}

inline DotSet dotset_from_json(const Json& j) {
    const std::string what = "dot set";
    DotSet set;
    set.source = detail::get_field<std::string>(j, "source", what);
    set.width = detail::get_field<int>(j, "width", what);
    set.height = detail::get_field<int>(j, "height", what);
    require(j.contains("dots") && j.at("dots").is_array(), what + ": missing key \"dots\"");
    for (const Json& e : j.at("dots")) {
        Dot d;
        d.x = detail::get_field<double>(e, "x", what);
        d.y = detail::get_field<double>(e, "y", what);
        d.color = dot_color_from_string(detail::get_field<std::string>(e, "color", what));
        d.block = detail::get_field<int>(e, "block", what);
        set.dots.push_back(d);
    }
    return set;
}

// ---------------------------------------------------------------------------
// CorrespondenceSet: pairs carry coordinates, so the file stands alone.

inline Json to_json(const CorrespondenceSet& corr) {
    Json pairs = Json::array();
    for (const CorrespondencePair& p : corr.pairs) {
        const Dot& l = corr.left.dots[p.left];
        const Dot& r = corr.right.dots[p.right];
        Json e;
        e["lx"] = l.x;
        e["ly"] = l.y;
        e["rx"] = r.x;
        e["ry"] = r.y;
        e["color"] = to_string(p.color);
        pairs.push_back(std::move(e));
    }
    Json j;
    j["pairs"] = std::move(pairs);
    return j;
}

// Rebuilds a CorrespondenceSet whose dot i in each view backs pair i.
inline CorrespondenceSet correspondences_from_json(const Json& j) {
    const std::string what = "correspondence set";
    require(j.contains("pairs") && j.at("pairs").is_array(), what + ": missing key \"pairs\"");
    CorrespondenceSet corr;
    corr.left.source = "left";
    corr.right.source = "right";
    int i = 0;
    for (const Json& e : j.at("pairs")) {
        const DotColor c = dot_color_from_string(detail::get_field<std::string>(e, "color", what));
        corr.left.dots.push_back({detail::get_field<double>(e, "lx", what),
                                  detail::get_field<double>(e, "ly", what), c, 1});
        corr.right.dots.push_back({detail::get_field<double>(e, "rx", what),
                                   detail::get_field<double>(e, "ry", what), c, 1});
        corr.pairs.push_back({i, i, c});
        ++i;
    }
    return corr;
}

inline std::string correspondences_to_csv(const CorrespondenceSet& corr) {
    std::ostringstream out;
    out << "lx,ly,rx,ry,color\n";
    char buf[128];
    for (const CorrespondencePair& p : corr.pairs) {
        const Dot& l = corr.left.dots[p.left];
        const Dot& r = corr.right.dots[p.right];
        std::snprintf(buf, sizeof buf, "%.6f,%.6f,%.6f,%.6f,%s\n", l.x, l.y, r.x, r.y,
                      to_string(p.color));
        out << buf;
    }
    return out.str();
}

// ---------------------------------------------------------------------------
// Calibration: {left:{fx,fy,cx,cy,R,t}, right:{...}}, x_cam = R*X + t.

struct StereoCalibration {
    CameraModel left, right;
};

inline Json to_json(const CameraModel& cam) {
    Json j;
    j["fx"] = cam.fx;
    j["fy"] = cam.fy;
    j["cx"] = cam.cx;
    j["cy"] = cam.cy;
    Json rows = Json::array();
    for (int i = 0; i < 3; ++i)
        rows.push_back(Json::array({cam.rotation.m[i][0], cam.rotation.m[i][1],
                                    cam.rotation.m[i][2]}));
    j["R"] = std::move(rows);
    j["t"] = detail::vec3_json(cam.translation);
    return j;
}

inline CameraModel camera_from_json(const Json& j, const std::string& what) {
    CameraModel cam;
    cam.fx = detail::get_field<double>(j, "fx", what);
    cam.fy = detail::get_field<double>(j, "fy", what);
    cam.cx = detail::get_field<double>(j, "cx", what);
    cam.cy = detail::get_field<double>(j, "cy", what);
    require(j.contains("R") && j.at("R").is_array() && j.at("R").size() == 3,
            what + ": bad value for key \"R\"");
    for (int i = 0; i < 3; ++i) {
        const Json& row = j.at("R")[i];
        require(row.is_array() && row.size() == 3, what + ": bad value for key \"R\"");
        for (int k = 0; k < 3; ++k) cam.rotation.m[i][k] = row[k].get<double>();
    }
    require(j.contains("t"), what + ": missing key \"t\"");
    cam.translation = detail::vec3_from(j.at("t"), what + " t");
    cam.validate();
    return cam;
}

inline Json to_json(const StereoCalibration& calib) {
    Json j;
    j["left"] = to_json(calib.left);
    j["right"] = to_json(calib.right);
    return j;
}

inline StereoCalibration calibration_from_json(const Json& j) {
    const std::string what = "calibration";
    require(j.contains("left") && j.contains("right"),
            what + ": missing key \"left\" or \"right\"");
    return {camera_from_json(j.at("left"), what + " left"),
            camera_from_json(j.at("right"), what + " right")};
}

// ---------------------------------------------------------------------------
// PointCloud: ASCII PLY (x y z red green blue) and CSV.

namespace detail {

inline void dot_color_rgb(DotColor c, int& r, int& g, int& b) {
    r = c == DotColor::Red ? 255 : 0;
    g = c == DotColor::Green ? 255 : 0;
    b = c == DotColor::Blue ? 255 : 0;
}

}  // namespace detail

inline std::string cloud_to_ply(const PointCloud& cloud) {
    std::ostringstream out;
    out << "ply\nformat ascii 1.0\n";
    out << "element vertex " << cloud.points.size() << "\n";
    out << "property double x\nproperty double y\nproperty double z\n";
    out << "property uchar red\nproperty uchar green\nproperty uchar blue\n";
    out << "end_header\n";
    char buf[160];
    for (const CloudPoint& p : cloud.points) {
        int r, g, b;
        detail::dot_color_rgb(p.color, r, g, b);
        std::snprintf(buf, sizeof buf, "%.6f %.6f %.6f %d %d %d\n", p.position.x, p.position.y,
                      p.position.z, r, g, b);
        out << buf;
    }
    return out.str();
}

inline std::string cloud_to_csv(const PointCloud& cloud) {
    std::ostringstream out;
    out << "x,y,z,color\n";
    char buf[160];
    for (const CloudPoint& p : cloud.points) {
        std::snprintf(buf, sizeof buf, "%.6f,%.6f,%.6f,%s\n", p.position.x, p.position.y,
                      p.position.z, to_string(p.color));
        out << buf;
    }
    return out.str();
}

// ---------------------------------------------------------------------------
// SurfaceGrid CSV: header x0,y0,spacing,nx,ny then row-major z, holes "nan".

inline std::string grid_to_csv(const SurfaceGrid& grid) {
    std::ostringstream out;
    char buf[160];
    out << "x0,y0,spacing,nx,ny\n";
    std::snprintf(buf, sizeof buf, "%.6f,%.6f,%.6f,%d,%d\n", grid.x0, grid.y0, grid.spacing,
                  grid.nx, grid.ny);
    out << buf;
    for (int iy = 0; iy < grid.ny; ++iy) {
        for (int ix = 0; ix < grid.nx; ++ix) {
            if (ix) out << ',';
            const double z = grid.at(ix, iy);
            if (std::isnan(z)) {
                out << "nan";
            } else {
                std::snprintf(buf, sizeof buf, "%.6f", z);
                out << buf;
            }
        }
        out << '\n';
    }
    return out.str();
}

// ---------------------------------------------------------------------------
// SceneSpec / GroundTruth.

inline Json to_json(const SurfaceSpec& s) {
    Json j;
    j["type"] = to_string(s.type);
    j["normal"] = detail::vec3_json(s.normal);
    j["offset"] = s.offset;
    j["center"] = detail::vec3_json(s.center);
    j["radius"] = s.radius;
    j["apex"] = detail::vec3_json(s.apex);
    j["axis"] = detail::vec3_json(s.axis);
    j["half_angle"] = s.half_angle;
    j["marker_spacing"] = s.marker_spacing;
    return j;
}

inline SurfaceSpec surface_from_json(const Json& j) {
    const std::string what = "surface";
    SurfaceSpec s;
    s.type = surface_type_from_string(detail::get_field<std::string>(j, "type", what));
    if (j.contains("normal")) s.normal = detail::vec3_from(j.at("normal"), what + " normal");
    s.offset = detail::get_field_or(j, "offset", s.offset, what);
    if (j.contains("center")) s.center = detail::vec3_from(j.at("center"), what + " center");
    s.radius = detail::get_field_or(j, "radius", s.radius, what);
    if (j.contains("apex")) s.apex = detail::vec3_from(j.at("apex"), what + " apex");
    if (j.contains("axis")) s.axis = detail::vec3_from(j.at("axis"), what + " axis");
    s.half_angle = detail::get_field_or(j, "half_angle", s.half_angle, what);
    s.marker_spacing = detail::get_field_or(j, "marker_spacing", s.marker_spacing, what);
    s.validate();
    return s;
}

inline Json to_json(const SceneSpec& s) {
    Json j;
    j["surface"] = to_json(s.surface);
    j["projector"] = to_json(s.projector);
    j["left"] = to_json(s.left);
    j["right"] = to_json(s.right);
    j["image_width"] = s.image_width;
    j["image_height"] = s.image_height;
    j["noise_sigma"] = s.noise_sigma;
    j["blur_sigma"] = s.blur_sigma;
    j["ambient"] = s.ambient;
    j["seed"] = s.seed;
    return j;
}

inline SceneSpec scene_from_json(const Json& j) {
    const std::string what = "scene";
    SceneSpec s;
    require(j.contains("surface"), what + ": missing key \"surface\"");
    s.surface = surface_from_json(j.at("surface"));
    require(j.contains("projector") && j.contains("left") && j.contains("right"),
            what + ": missing camera block");
    s.projector = camera_from_json(j.at("projector"), what + " projector");
    s.left = camera_from_json(j.at("left"), what + " left");
    s.right = camera_from_json(j.at("right"), what + " right");
    s.image_width = detail::get_field_or(j, "image_width", s.image_width, what);
    s.image_height = detail::get_field_or(j, "image_height", s.image_height, what);
    s.noise_sigma = detail::get_field_or(j, "noise_sigma", s.noise_sigma, what);
    s.blur_sigma = detail::get_field_or(j, "blur_sigma", s.blur_sigma, what);
    s.ambient = detail::get_field_or(j, "ambient", s.ambient, what);
    s.seed = detail::get_field_or<uint64_t>(j, "seed", s.seed, what);
    s.validate();
    return s;
}

inline Json to_json(const GroundTruth& gt) {
    const auto proj = [](const GtProjection& p) {
        Json e;
        e["x"] = p.x;
        e["y"] = p.y;
        e["visible"] = p.visible;
        return e;
    };
    Json dots = Json::array(), pl = Json::array(), pr = Json::array();
    for (size_t i = 0; i < gt.dots3d.size(); ++i) {
        Json e;
        e["position"] = detail::vec3_json(gt.dots3d[i].position);
        e["color"] = to_string(gt.dots3d[i].color);
        e["pattern_index"] = gt.dots3d[i].pattern_index;
        dots.push_back(std::move(e));
        pl.push_back(proj(gt.visible_left[i]));
        pr.push_back(proj(gt.visible_right[i]));
    }
    Json j;
    j["dots3d"] = std::move(dots);
    j["visible_left"] = std::move(pl);
    j["visible_right"] = std::move(pr);
    j["covisible"] = gt.covisible;
    return j;
}

inline GroundTruth ground_truth_from_json(const Json& j) {
    const std::string what = "ground truth";
    const auto proj = [&](const Json& e) {
        GtProjection p;
        p.x = detail::get_field<double>(e, "x", what);
        p.y = detail::get_field<double>(e, "y", what);
        p.visible = detail::get_field<bool>(e, "visible", what);
        return p;
    };
    GroundTruth gt;
    require(j.contains("dots3d") && j.at("dots3d").is_array(),
            what + ": missing key \"dots3d\"");
    for (const Json& e : j.at("dots3d")) {
        GroundTruth::Item it;
        require(e.contains("position"), what + ": missing key \"position\"");
        it.position = detail::vec3_from(e.at("position"), what + " position");
        it.color = dot_color_from_string(detail::get_field<std::string>(e, "color", what));
        it.pattern_index = detail::get_field<int>(e, "pattern_index", what);
        gt.dots3d.push_back(it);
    }
    require(j.contains("visible_left") && j.contains("visible_right"),
            what + ": missing projections");
    for (const Json& e : j.at("visible_left")) gt.visible_left.push_back(proj(e));
    for (const Json& e : j.at("visible_right")) gt.visible_right.push_back(proj(e));
    require(gt.visible_left.size() == gt.dots3d.size() &&
                gt.visible_right.size() == gt.dots3d.size(),
            what + ": projection arrays must parallel dots3d");
    gt.covisible = detail::get_field_or(j, "covisible", gt.covisible, what);
    return gt;
}

// ---------------------------------------------------------------------------
// EvalReport (NaN metrics serialize as null).

inline Json to_json(const EvalReport& rep) {
    const auto num = [](double v) { return std::isnan(v) ? Json() : Json(v); };
    Json j;
    j["match_precision"] = rep.match_precision;
    j["match_recall"] = rep.match_recall;
    j["rmse3d"] = num(rep.rmse3d);
    j["marker_mse"] = num(rep.marker_mse);
    j["marker_rmse"] = num(rep.marker_rmse);
    j["fitted_radius"] = num(rep.fitted_radius);
    j["md"] = num(rep.md);
    j["points"] = rep.points;
    j["dropped"] = rep.dropped;
    j["cycles"] = rep.cycles;
    j["converged"] = rep.converged;
    j["warning"] = rep.warning;
    return j;
}

// Canonical on-disk form: 2-space indent plus trailing newline, so reruns are
// byte-identical.
inline std::string json_text(const Json& j) { return j.dump(2) + "\n"; }

}  // namespace dotstereo
