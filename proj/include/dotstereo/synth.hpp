// Synthetic stereo oracle: a projector modeled as an inverse pinhole camera
// casts the dot pattern onto a parametric surface; two cameras image the
// result. Produces the stereo pair plus exact 3D dot positions, exact
// sub-pixel projections, and the covisible index set.
#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dotstereo/filters.hpp"
#include "dotstereo/geometry.hpp"
#include "dotstereo/pattern.hpp"

namespace dotstereo {

enum class SurfaceType { Plane, Sphere, Cone, MarkerGrid };

inline const char* to_string(SurfaceType t) {
    switch (t) {
        case SurfaceType::Plane: return "plane";
        case SurfaceType::Sphere: return "sphere";
        case SurfaceType::Cone: return "cone";
        default: return "marker_grid";
    }
}

inline SurfaceType surface_type_from_string(const std::string& s) {
    if (s == "plane") return SurfaceType::Plane;
    if (s == "sphere") return SurfaceType::Sphere;
    if (s == "cone") return SurfaceType::Cone;
    require(s == "marker_grid", "unknown surface type: " + s);
    return SurfaceType::MarkerGrid;
}

struct SurfaceSpec {
    SurfaceType type = SurfaceType::Plane;
    // Plane / marker grid: points satisfying normal . x = offset.
    Vec3 normal{0, 0, 1};
    double offset = 800;
    // Sphere.
    Vec3 center{0, 0, 800};
    double radius = 85;
    // Cone (single nappe opening along +axis from the apex).
    Vec3 apex{0, 0, 900};
    Vec3 axis{0, 0, -1};
    double half_angle = 0.5;  // radians
    // Marker grid: 5x5 markers on the plane around its principal point.
    double marker_spacing = 10;  // mm

    void validate() const {
        switch (type) {
            case SurfaceType::Plane:
            case SurfaceType::MarkerGrid:
                require(normal.norm() > 0, "surface: zero plane normal");
                require(type != SurfaceType::MarkerGrid || marker_spacing > 0,
                        "surface: marker spacing must be positive");
                break;
            case SurfaceType::Sphere:
                require(radius > 0, "surface: sphere radius must be positive");
                break;
            case SurfaceType::Cone:
                require(axis.norm() > 0, "surface: zero cone axis");
                require(half_angle > 0 && half_angle < 1.5, "surface: bad cone half-angle");
                break;
        }
    }

    // Signed implicit-equation residual, zero on the surface.
    double implicit(const Vec3& p) const {
        switch (type) {
            case SurfaceType::Plane:
            case SurfaceType::MarkerGrid:
                return normal.normalized().dot(p) - offset / normal.norm();
            case SurfaceType::Sphere:
                return (p - center).norm() - radius;
            default: {
                const Vec3 d = p - apex;
                return d.dot(axis.normalized()) - d.norm() * std::cos(half_angle);
            }
        }
    }
};

struct SceneSpec {
    SurfaceSpec surface;
    CameraModel projector;  // pattern plane = its image plane, used in reverse
    CameraModel left, right;
    int image_width = 2048;
    int image_height = 1536;
    double noise_sigma = 0;  // 8-bit units
    double blur_sigma = 0;   // px
    double ambient = 0;      // 8-bit offset
    uint64_t seed = 0;

    void validate() const {
        surface.validate();
        projector.validate();
        left.validate();
        right.validate();
        require(image_width > 0 && image_height > 0, "scene: empty image");
        require(noise_sigma >= 0 && ambient >= 0, "scene: negative noise or ambient");
        require(blur_sigma >= 0, "scene: negative blur");
    }
};

struct GtProjection {
    double x = 0, y = 0;
    bool visible = false;
};

struct GroundTruth {
    struct Item {
        Vec3 position;
        DotColor color = DotColor::Red;
        int pattern_index = -1;
    };
    std::vector<Item> dots3d;              // pattern dots that hit the surface
    std::vector<GtProjection> visible_left;   // parallel to dots3d
    std::vector<GtProjection> visible_right;  // parallel to dots3d
    std::vector<int> covisible;               // indices into dots3d
};

namespace detail {

// Smallest intersection parameter t > eps along the ray, if any. `behind` is
// set when the only intersections lie behind the origin.
inline std::optional<double> intersect_surface(const SurfaceSpec& s, const Ray& ray,
                                               bool* behind = nullptr) {
    constexpr double eps = 1e-9;
    if (behind) *behind = false;
    switch (s.type) {
        case SurfaceType::Plane:
        case SurfaceType::MarkerGrid: {
            const double denom = s.normal.dot(ray.direction);
            if (std::abs(denom) < 1e-12) return std::nullopt;
            const double t = (s.offset - s.normal.dot(ray.origin)) / denom;
            if (t > eps) return t;
            if (behind) *behind = true;
            return std::nullopt;
        }
        case SurfaceType::Sphere: {
            const Vec3 oc = ray.origin - s.center;
            const double b = oc.dot(ray.direction);
            const double c = oc.dot(oc) - s.radius * s.radius;
            const double disc = b * b - c;
            if (disc < 0) return std::nullopt;
            const double sq = std::sqrt(disc);
            for (const double t : {-b - sq, -b + sq})
                if (t > eps) return t;
            if (behind) *behind = true;
            return std::nullopt;
        }
        default: {  // cone, single nappe
            const Vec3 ax = s.axis.normalized();
            const double cos2 = std::cos(s.half_angle) * std::cos(s.half_angle);
            const Vec3 co = ray.origin - s.apex;
            const double dv = ray.direction.dot(ax), cv = co.dot(ax);
            const double a = dv * dv - cos2;
            const double b = dv * cv - cos2 * ray.direction.dot(co);
            const double c = cv * cv - cos2 * co.dot(co);
            std::vector<double> roots;
            if (std::abs(a) < 1e-14) {
                if (std::abs(b) > 1e-14) roots.push_back(-c / (2 * b));
            } else {
                const double disc = b * b - a * c;
                if (disc < 0) return std::nullopt;
                const double sq = std::sqrt(disc);
                roots = {(-b - sq) / a, (-b + sq) / a};
                if (roots[0] > roots[1]) std::swap(roots[0], roots[1]);
            }
            bool saw_behind = false;
            for (const double t : roots) {
                const Vec3 p = ray.origin + ray.direction * t - s.apex;
                if (p.dot(ax) < 0) continue;  // other nappe
                if (t > eps) return t;
                saw_behind = true;
            }
            if (behind) *behind = saw_behind;
            return std::nullopt;
        }
    }
}

// A surface point is visible from the camera iff the first surface hit along
// the viewing ray is that point (self-occlusion test).
inline bool visible_from(const SurfaceSpec& s, const CameraModel& cam, const Vec3& p) {
    const Vec3 c = cam.center();
    const double dist = (p - c).norm();
    const Ray ray{c, (p - c) * (1.0 / dist)};
    const auto t = intersect_surface(s, ray);
    return t && std::abs(*t - dist) <= 1e-6 * std::max(dist, 1.0);
}

// Deterministic Gaussian stream: Box-Muller over a splitmix64 counter. The
// stdlib distributions are implementation-defined, so the noise is generated
// from raw engine bits to keep renders bit-identical across toolchains.
struct GaussStream {
    uint64_t state;
    bool has_spare = false;
    double spare = 0;

    explicit GaussStream(uint64_t seed) : state(seed) {}

    double uniform() {  // (0, 1]
        state += 0x9e3779b97f4a7c15ull;
        uint64_t x = state;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
        x ^= x >> 31;
        return ((x >> 11) + 1) * 0x1.0p-53;
    }

    double operator()() {
        if (has_spare) {
            has_spare = false;
            return spare;
        }
        const double u = uniform(), v = uniform();
        const double r = std::sqrt(-2.0 * std::log(u));
        const double a = 6.283185307179586476925286766559 * v;
        spare = r * std::sin(a);
        has_spare = true;
        return r * std::cos(a);
    }
};

}  // namespace detail

// Camera at `position` looking at `target`, image x along world +x.
inline CameraModel look_at_camera(const Vec3& position, const Vec3& target, double focal,
                                  double cx, double cy) {
    const Vec3 z = (target - position).normalized();
    const Vec3 x = Vec3{0, 1, 0}.cross(z).normalized();
    const Vec3 y = z.cross(x);
    CameraModel cam;
    cam.fx = cam.fy = focal;
    cam.cx = cx;
    cam.cy = cy;
    cam.rotation.m[0][0] = x.x; cam.rotation.m[0][1] = x.y; cam.rotation.m[0][2] = x.z;
    cam.rotation.m[1][0] = y.x; cam.rotation.m[1][1] = y.y; cam.rotation.m[1][2] = y.z;
    cam.rotation.m[2][0] = z.x; cam.rotation.m[2][1] = z.y; cam.rotation.m[2][2] = z.z;
    cam.translation = (cam.rotation * position) * -1.0;
    return cam;
}

// Default rig: projector at the origin looking down +z with a longer focal
// than the cameras, so the projected footprint (~68 x 51 mm at the 800 mm
// working distance) fits both camera views with margin; cameras on a 20 mm
// baseline, verged at the working point. Baseline and footprint are sized so
// the disparity variation across the reference surfaces stays within the
// matcher's fixed [-10, 10] / [-5, 5] search windows.
inline SceneSpec default_scene(SurfaceType type) {
    SceneSpec scene;
    scene.surface.type = type;
    const double wd = 800;
    scene.projector = look_at_camera({0, 0, 0}, {0, 0, wd}, 24000, 2048 / 2.0 - 0.5,
                                     1536 / 2.0 - 0.5);
    const double cx = scene.image_width / 2.0 - 0.5, cy = scene.image_height / 2.0 - 0.5;
    scene.left = look_at_camera({-10, 0, 0}, {0, 0, wd}, 17400, cx, cy);
    scene.right = look_at_camera({10, 0, 0}, {0, 0, wd}, 17400, cx, cy);
    scene.surface.offset = wd;
    scene.surface.center = {0, 0, wd + 60};  // sphere bulges ~25 mm toward the rig
    scene.surface.apex = {0, 0, wd + 80};
    scene.surface.axis = {0, 0, -1};
    scene.surface.half_angle = 1.2;
    return scene;
}

// Rectified variant: parallel optical axes, shared intrinsics, horizontal
// baseline; shorter focal so both shifted footprints stay in view.
inline SceneSpec rectified_scene(SurfaceType type) {
    SceneSpec scene = default_scene(type);
    const double cx = scene.image_width / 2.0 - 0.5, cy = scene.image_height / 2.0 - 0.5;
    scene.left = look_at_camera({-10, 0, 0}, {-10, 0, 800}, 12000, cx, cy);
    scene.right = look_at_camera({10, 0, 0}, {10, 0, 800}, 12000, cx, cy);
    return scene;
}

// The 25 ground-truth marker positions: a 5x5 grid on the plane, centered at
// the projector's principal ray hit, axes aligned with the projector image.
inline std::vector<Vec3> marker_points(const SceneSpec& scene) {
    require(scene.surface.type == SurfaceType::MarkerGrid, "markers need a marker_grid surface");
    const Ray principal =
        pixel_to_ray(scene.projector, scene.projector.cx, scene.projector.cy);
    const auto t = detail::intersect_surface(scene.surface, principal);
    require(t.has_value(), "surface behind projector");
    const Vec3 c = principal.origin + principal.direction * *t;
    const Vec3 n = scene.surface.normal.normalized();
    Vec3 u = scene.projector.rotation.transposed() * Vec3{1, 0, 0};
    u = (u - n * u.dot(n)).normalized();
    const Vec3 v = n.cross(u);
    std::vector<Vec3> pts;
    for (int j = -2; j <= 2; ++j)
        for (int i = -2; i <= 2; ++i)
            pts.push_back(c + u * (i * scene.surface.marker_spacing) +
                          v * (j * scene.surface.marker_spacing));
    return pts;
}

struct StereoRender {
    RgbImage left, right;
    GroundTruth truth;
};

inline StereoRender render_stereo(const SceneSpec& scene, const PatternSpec& pattern) {
    scene.validate();
    pattern.validate();
    const DotSet pattern_dots = pattern_ground_truth(pattern);

    StereoRender out;
    out.left = RgbImage(scene.image_width, scene.image_height);
    out.right = RgbImage(scene.image_width, scene.image_height);

    const double proj_f = scene.projector.fx;
    struct Splat {
        double x, y, r;
        DotColor color;
    };
    std::vector<Splat> splat_left, splat_right;

    for (size_t pi = 0; pi < pattern_dots.dots.size(); ++pi) {
        const Dot& d = pattern_dots.dots[pi];
        const Ray ray = pixel_to_ray(scene.projector, d.x, d.y);
        bool behind = false;
        const auto t = detail::intersect_surface(scene.surface, ray, &behind);
        require(!behind, "surface behind projector");
        if (!t) continue;  // this dot misses the surface
        const Vec3 hit = ray.origin + ray.direction * *t;
        const double proj_depth = (scene.projector.rotation * hit + scene.projector.translation).z;

        GroundTruth::Item item{hit, d.color, static_cast<int>(pi)};
        GtProjection pl, pr;
        for (int side = 0; side < 2; ++side) {
            const CameraModel& cam = side == 0 ? scene.left : scene.right;
            GtProjection& prj = side == 0 ? pl : pr;
            const Vec3 c = cam.rotation * hit + cam.translation;
            if (c.z <= 0) continue;
            prj.x = cam.fx * c.x / c.z + cam.cx;
            prj.y = cam.fy * c.y / c.z + cam.cy;
            // Local magnification ratio camera/projector sets the disk size.
            const double r_px = pattern.dot_radius * (cam.fx * proj_depth) / (proj_f * c.z);
            const double margin = r_px + 2;
            if (prj.x < margin || prj.x > scene.image_width - 1 - margin || prj.y < margin ||
                prj.y > scene.image_height - 1 - margin)
                continue;
            if (!detail::visible_from(scene.surface, cam, hit)) continue;
            prj.visible = true;
            (side == 0 ? splat_left : splat_right).push_back({prj.x, prj.y, r_px, d.color});
        }
        out.truth.dots3d.push_back(item);
        out.truth.visible_left.push_back(pl);
        out.truth.visible_right.push_back(pr);
        if (pl.visible && pr.visible)
            out.truth.covisible.push_back(static_cast<int>(out.truth.dots3d.size()) - 1);
    }

    require(!out.truth.dots3d.empty() &&
                out.truth.covisible.size() * 5 >= out.truth.dots3d.size() * 4,
            "degenerate scene");

    for (const Splat& s : splat_left) render_dot(out.left, s.x, s.y, s.r, s.color);
    for (const Splat& s : splat_right) render_dot(out.right, s.x, s.y, s.r, s.color);

    // Blur, then ambient offset and seeded Gaussian noise, per camera.
    for (int side = 0; side < 2; ++side) {
        RgbImage& img = side == 0 ? out.left : out.right;
        if (scene.blur_sigma > 0) {
            for (int c = 0; c < 3; ++c) {
                ScalarImage chan(img.width, img.height);
                for (size_t i = 0; i < chan.data.size(); ++i)
                    chan.data[i] = img.data[3 * i + c] / 255.f;
                chan = gaussian_blur(chan, scene.blur_sigma);
                for (size_t i = 0; i < chan.data.size(); ++i)
                    img.data[3 * i + c] =
                        static_cast<uint8_t>(std::lround(std::clamp(chan.data[i], 0.f, 1.f) * 255));
            }
        }
        if (scene.ambient > 0 || scene.noise_sigma > 0) {
            detail::GaussStream noise(scene.seed * 2 + side + 1);
            for (size_t i = 0; i < img.data.size(); ++i) {
                double v = img.data[i] + scene.ambient;
                if (scene.noise_sigma > 0) v += scene.noise_sigma * noise();
                img.data[i] = static_cast<uint8_t>(std::clamp(std::lround(v), 0l, 255l));
            }
        }
    }
    return out;
}

}  // namespace dotstereo
