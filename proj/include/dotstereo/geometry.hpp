// Pinhole cameras, pixel-to-ray casting, ray-ray triangulation (closed-form
// least squares and the explicit common-perpendicular construction), the
// disparity baseline, and uniform-grid surface resampling.
#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "dotstereo/delaunay.hpp"
#include "dotstereo/dotset.hpp"
#include "dotstereo/image.hpp"

namespace dotstereo {

struct Vec3 {
    double x = 0, y = 0, z = 0;

    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
    Vec3 cross(const Vec3& o) const {
        return {y * o.z - z * o.y, z * o.x - x * o.z, x * o.y - y * o.x};
    }
    double norm() const { return std::sqrt(dot(*this)); }
    Vec3 normalized() const {
        const double n = norm();
        require(n > 0, "cannot normalize zero vector");
        return {x / n, y / n, z / n};
    }
};

struct Mat3 {
    double m[3][3] = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};

    Vec3 operator*(const Vec3& v) const {
        return {m[0][0] * v.x + m[0][1] * v.y + m[0][2] * v.z,
                m[1][0] * v.x + m[1][1] * v.y + m[1][2] * v.z,
                m[2][0] * v.x + m[2][1] * v.y + m[2][2] * v.z};
    }
    Mat3 transposed() const {
        Mat3 t;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) t.m[i][j] = m[j][i];
        return t;
    }
    Mat3 operator*(const Mat3& o) const {
        Mat3 r;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                r.m[i][j] = 0;
                for (int k = 0; k < 3; ++k) r.m[i][j] += m[i][k] * o.m[k][j];
            }
        return r;
    }
};

// Rodrigues rotation about a unit axis.
inline Mat3 rotation_axis_angle(const Vec3& axis, double angle) {
    const Vec3 u = axis.normalized();
    const double c = std::cos(angle), s = std::sin(angle), v = 1 - c;
    Mat3 r;
    r.m[0][0] = c + u.x * u.x * v;
    r.m[0][1] = u.x * u.y * v - u.z * s;
    r.m[0][2] = u.x * u.z * v + u.y * s;
    r.m[1][0] = u.y * u.x * v + u.z * s;
    r.m[1][1] = c + u.y * u.y * v;
    r.m[1][2] = u.y * u.z * v - u.x * s;
    r.m[2][0] = u.z * u.x * v - u.y * s;
    r.m[2][1] = u.z * u.y * v + u.x * s;
    r.m[2][2] = c + u.z * u.z * v;
    return r;
}

// Pinhole camera, world-to-camera convention x_cam = R * X_world + t.
struct CameraModel {
    double fx = 1, fy = 1, cx = 0, cy = 0;
    Mat3 rotation;
    Vec3 translation;

    void validate() const {
        require(fx > 0 && fy > 0, "camera: focal lengths must be positive");
        const Mat3 p = rotation * rotation.transposed();
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                require(std::abs(p.m[i][j] - (i == j ? 1.0 : 0.0)) < 1e-9,
                        "camera: rotation not orthonormal");
    }

    Vec3 center() const { return rotation.transposed() * (translation * -1.0); }

    // World point -> pixel; depth (camera z) returned for visibility checks.
    void project(const Vec3& X, double& px, double& py, double& depth) const {
        const Vec3 c = rotation * X + translation;
        require(c.z > 0, "camera: point behind camera");
        px = fx * c.x / c.z + cx;
        py = fy * c.y / c.z + cy;
        depth = c.z;
    }
};

struct Ray {
    Vec3 origin;
    Vec3 direction;  // unit
};

inline Ray pixel_to_ray(const CameraModel& cam, double px, double py) {
    Ray r;
    r.origin = cam.center();
    const Vec3 d{(px - cam.cx) / cam.fx, (py - cam.cy) / cam.fy, 1.0};
    r.direction = cam.rotation.transposed() * d.normalized();
    return r;
}

struct Triangulation {
    Vec3 point;
    double residual = 0;  // length of the common-perpendicular segment, mm
};

// Closed-form least squares: solve the 2x2 normal system for the ray
// parameters minimizing the inter-point distance, return the midpoint.
inline Triangulation intersect_analytic(const Ray& r1, const Ray& r2) {
    require(r1.direction.cross(r2.direction).norm() > 1e-12, "degenerate ray pair");
    const Vec3 w = r1.origin - r2.origin;
    const double a = r1.direction.dot(r1.direction);
    const double b = r1.direction.dot(r2.direction);
    const double c = r2.direction.dot(r2.direction);
    const double d = r1.direction.dot(w);
    const double e = r2.direction.dot(w);
    const double den = a * c - b * b;
    const double t = (b * e - c * d) / den;
    const double s = (a * e - b * d) / den;
    const Vec3 p1 = r1.origin + r1.direction * t;
    const Vec3 p2 = r2.origin + r2.direction * s;
    return {(p1 + p2) * 0.5, (p1 - p2).norm()};
}

// Independent construction: closest point on each ray via the common
// perpendicular n = d1 x d2, midpoint of the shortest segment.
inline Triangulation intersect_midpoint(const Ray& r1, const Ray& r2) {
    const Vec3 n = r1.direction.cross(r2.direction);
    require(n.norm() > 1e-12, "degenerate ray pair");
    const Vec3 n1 = r1.direction.cross(n);
    const Vec3 n2 = r2.direction.cross(n);
    const Vec3 p1 =
        r1.origin + r1.direction * ((r2.origin - r1.origin).dot(n2) / r1.direction.dot(n2));
    const Vec3 p2 =
        r2.origin + r2.direction * ((r1.origin - r2.origin).dot(n1) / r2.direction.dot(n1));
    return {(p1 + p2) * 0.5, (p1 - p2).norm()};
}

struct CloudPoint {
    Vec3 position;
    DotColor color = DotColor::Red;
    double residual = 0;
    int pair_index = -1;  // index into the originating CorrespondenceSet::pairs
};

struct PointCloud {
    std::vector<CloudPoint> points;
    int dropped = 0;
    std::string warning;
};

enum class TriangulationMethod { Analytic, Midpoint };

inline PointCloud reconstruct(const CorrespondenceSet& corr, const CameraModel& left,
                              const CameraModel& right,
                              TriangulationMethod method = TriangulationMethod::Analytic,
                              double residual_gate_mm = 5.0) {
    left.validate();
    right.validate();
    PointCloud cloud;
    if ((left.center() - right.center()).norm() < 1e-9) {
        cloud.dropped = static_cast<int>(corr.pairs.size());
        cloud.warning = "zero baseline: all correspondences degenerate";
        return cloud;
    }
    for (size_t pi = 0; pi < corr.pairs.size(); ++pi) {
        const CorrespondencePair& p = corr.pairs[pi];
        const Dot& dl = corr.left.dots[p.left];
        const Dot& dr = corr.right.dots[p.right];
        const Ray rl = pixel_to_ray(left, dl.x, dl.y);
        const Ray rr = pixel_to_ray(right, dr.x, dr.y);
        Triangulation tri;
        try {
            tri = method == TriangulationMethod::Analytic ? intersect_analytic(rl, rr)
                                                          : intersect_midpoint(rl, rr);
        } catch (const std::runtime_error&) {
            ++cloud.dropped;
            continue;
        }
        if (tri.residual > residual_gate_mm) {
            ++cloud.dropped;
            continue;
        }
        cloud.points.push_back({tri.point, p.color, tri.residual, static_cast<int>(pi)});
    }
    return cloud;
}

// Z = f B / (x_l - x_r), valid only for rectified rigs (shared orientation,
// horizontal baseline). Exists to reproduce the disparity-vs-ray comparison.
inline PointCloud reconstruct_disparity(const CorrespondenceSet& corr, const CameraModel& left,
                                        const CameraModel& right) {
    left.validate();
    right.validate();
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            require(std::abs(left.rotation.m[i][j] - right.rotation.m[i][j]) < 1e-6,
                    "disparity requires rectified cameras");
    const Vec3 b = right.center() - left.center();
    const double base = b.norm();
    require(base > 1e-9 && std::abs(b.y) < 1e-6 * base && std::abs(b.z) < 1e-6 * base,
            "disparity requires rectified cameras");

    PointCloud cloud;
    for (size_t pi = 0; pi < corr.pairs.size(); ++pi) {
        const CorrespondencePair& p = corr.pairs[pi];
        const Dot& dl = corr.left.dots[p.left];
        const Dot& dr = corr.right.dots[p.right];
        const double disp = dl.x - dr.x;
        if (std::abs(disp) < 1e-12) {
            ++cloud.dropped;
            continue;
        }
        // With the right camera at +x of the left one, disparity is positive
        // for points in front; a flipped rig flips the sign.
        const double z = left.fx * base / disp * (b.x > 0 ? 1.0 : -1.0);
        if (z <= 0) {
            ++cloud.dropped;
            continue;
        }
        const Vec3 cam{(dl.x - left.cx) / left.fx * z, (dl.y - left.cy) / left.fy * z, z};
        cloud.points.push_back({left.rotation.transposed() * (cam - left.translation), p.color,
                                0.0, static_cast<int>(pi)});
    }
    return cloud;
}

struct SurfaceGrid {
    double x0 = 0, y0 = 0;  // mm
    double spacing = 1;     // mm
    int nx = 0, ny = 0;
    std::vector<double> z;  // row-major, NaN = hole (outside the data hull)

    double at(int ix, int iy) const { return z[static_cast<size_t>(iy) * nx + ix]; }
};

// Resample the cloud's Z = f(X, Y) onto a uniform grid via the same Delaunay
// piecewise-linear engine as the matching fields; out-of-hull cells are holes.
inline SurfaceGrid upsample_surface(const PointCloud& cloud, double spacing_mm) {
    require(spacing_mm > 0, "surface grid spacing must be positive");
    require(cloud.points.size() >= 3, "mapping underdetermined");
    std::vector<std::pair<double, double>> sites;
    std::vector<double> vz;
    double lo_x = 1e300, hi_x = -1e300, lo_y = 1e300, hi_y = -1e300;
    for (const CloudPoint& p : cloud.points) {
        sites.emplace_back(p.position.x, p.position.y);
        vz.push_back(p.position.z);
        lo_x = std::min(lo_x, p.position.x);
        hi_x = std::max(hi_x, p.position.x);
        lo_y = std::min(lo_y, p.position.y);
        hi_y = std::max(hi_y, p.position.y);
    }
    const MappingField field(sites, vz, std::vector<double>(vz.size(), 0.0));
    SurfaceGrid grid;
    grid.x0 = lo_x;
    grid.y0 = lo_y;
    grid.spacing = spacing_mm;
    grid.nx = std::max(1, static_cast<int>(std::floor((hi_x - lo_x) / spacing_mm)) + 1);
    grid.ny = std::max(1, static_cast<int>(std::floor((hi_y - lo_y) / spacing_mm)) + 1);
    grid.z.assign(static_cast<size_t>(grid.nx) * grid.ny,
                  std::numeric_limits<double>::quiet_NaN());
    for (int iy = 0; iy < grid.ny; ++iy)
        for (int ix = 0; ix < grid.nx; ++ix) {
            const auto e = field(lo_x + ix * spacing_mm, lo_y + iy * spacing_mm);
            if (!e.extrapolated) grid.z[static_cast<size_t>(iy) * grid.nx + ix] = e.x;
        }
    return grid;
}

}  // namespace dotstereo
