// Scattered-data interpolation: Bowyer-Watson Delaunay triangulation with
// piecewise-linear evaluation inside the hull and nearest-site extrapolation
// outside. Sites get a tiny deterministic jitter internally so the cocircular
// quads of near-lattice dot grids never hit the degenerate incircle case;
// barycentric weights are computed from the original coordinates, so affine
// data is reproduced exactly.
#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

#include "dotstereo/image.hpp"

namespace dotstereo {

namespace detail {

inline uint64_t splitmix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

inline double jitter_of(uint64_t i, uint64_t axis) {
    return (splitmix64(i * 2 + axis) >> 11) * 0x1.0p-53 * 1e-6;
}

}  // namespace detail

class Delaunay {
public:
    // Throws "mapping underdetermined" for < 3 sites or all-collinear sites.
    explicit Delaunay(const std::vector<std::pair<double, double>>& sites) {
        const size_t n = sites.size();
        require(n >= 3, "mapping underdetermined");
        ox_.resize(n);
        oy_.resize(n);
        px_.resize(n + 3);
        py_.resize(n + 3);
        double lo_x = 1e300, hi_x = -1e300, lo_y = 1e300, hi_y = -1e300;
        for (size_t i = 0; i < n; ++i) {
            ox_[i] = sites[i].first;
            oy_[i] = sites[i].second;
            px_[i] = ox_[i] + detail::jitter_of(i, 0);
            py_[i] = oy_[i] + detail::jitter_of(i, 1);
            lo_x = std::min(lo_x, px_[i]);
            hi_x = std::max(hi_x, px_[i]);
            lo_y = std::min(lo_y, py_[i]);
            hi_y = std::max(hi_y, py_[i]);
        }
        bbox_ = {lo_x, lo_y, hi_x, hi_y};

        // Collinear inputs (before jitter) are underdetermined, not slivers.
        size_t far_i = 0;
        double far_d = -1;
        for (size_t i = 1; i < n; ++i) {
            const double d = (ox_[i] - ox_[0]) * (ox_[i] - ox_[0]) +
                             (oy_[i] - oy_[0]) * (oy_[i] - oy_[0]);
            if (d > far_d) {
                far_d = d;
                far_i = i;
            }
        }
        const double bx = ox_[far_i] - ox_[0], by = oy_[far_i] - oy_[0];
        const double blen = std::sqrt(far_d);
        double off = 0;
        for (size_t i = 0; i < n; ++i)
            off = std::max(off, std::abs(bx * (oy_[i] - oy_[0]) - by * (ox_[i] - ox_[0])));
        require(blen > 0 && off > 1e-9 * blen, "mapping underdetermined");
        const double span = std::max({hi_x - lo_x, hi_y - lo_y, 1.0}) * 50.0;
        const double cx = (lo_x + hi_x) / 2, cy = (lo_y + hi_y) / 2;
        const int sv = static_cast<int>(n);
        px_[sv] = cx - span;
        py_[sv] = cy - span * 0.5;
        px_[sv + 1] = cx + span;
        py_[sv + 1] = cy - span * 0.5;
        px_[sv + 2] = cx;
        py_[sv + 2] = cy + span;

        std::vector<std::array<int, 3>> tris{{sv, sv + 1, sv + 2}};
        std::vector<std::array<int, 2>> boundary;
        std::vector<std::array<int, 3>> keep;
        for (int p = 0; p < sv; ++p) {
            boundary.clear();
            keep.clear();
            for (const auto& t : tris) {
                if (in_circumcircle(t, p)) {
                    push_edge(boundary, t[0], t[1]);
                    push_edge(boundary, t[1], t[2]);
                    push_edge(boundary, t[2], t[0]);
                } else {
                    keep.push_back(t);
                }
            }
            tris.swap(keep);
            for (const auto& e : boundary)
                if (e[0] >= 0) tris.push_back(make_ccw(e[0], e[1], p));
        }
        for (const auto& t : tris)
            if (t[0] < sv && t[1] < sv && t[2] < sv) tris_.push_back(t);
        require(!tris_.empty(), "mapping underdetermined");
        build_grids();
    }

    size_t site_count() const { return ox_.size(); }
    size_t triangle_count() const { return tris_.size(); }
    double site_x(int i) const { return ox_[i]; }
    double site_y(int i) const { return oy_[i]; }
    const std::vector<std::array<int, 3>>& triangles() const { return tris_; }

    struct Location {
        bool inside = false;
        std::array<int, 3> vertices{};
        std::array<double, 3> weights{};  // barycentric, from original coords
        int nearest_site = -1;            // set when outside the hull
    };

    Location locate(double qx, double qy) const {
        Location loc;
        const int cxi = cell_of(qx, bbox_[0], cols_);
        const int cyi = cell_of(qy, bbox_[1], rows_);
        if (cxi >= 0 && cyi >= 0)
            for (int ti : tri_cells_[static_cast<size_t>(cyi) * cols_ + cxi]) {
                const auto& t = tris_[ti];
                double w0, w1, w2;
                if (!bary(px_[t[0]], py_[t[0]], px_[t[1]], py_[t[1]], px_[t[2]], py_[t[2]], qx,
                          qy, w0, w1, w2))
                    continue;
                // Tolerance must exceed the relative weight error the internal
                // 1e-6 jitter induces, or hull-boundary queries fall outside.
                if (w0 < -1e-5 || w1 < -1e-5 || w2 < -1e-5) continue;
                loc.inside = true;
                loc.vertices = t;
                // Recompute the weights from the unjittered coordinates; fall
                // back to the jittered ones for originally-degenerate slivers.
                if (!bary(ox_[t[0]], oy_[t[0]], ox_[t[1]], oy_[t[1]], ox_[t[2]], oy_[t[2]], qx,
                          qy, loc.weights[0], loc.weights[1], loc.weights[2]))
                    loc.weights = {w0, w1, w2};
                return loc;
            }
        loc.nearest_site = nearest_site(qx, qy);
        return loc;
    }

    int nearest_site(double qx, double qy) const {
        const int cx = std::clamp(cell_of_clamped(qx, bbox_[0], cols_), 0, cols_ - 1);
        const int cy = std::clamp(cell_of_clamped(qy, bbox_[1], rows_), 0, rows_ - 1);
        int best = -1;
        double bd = 1e300;
        for (int ring = 0; ring < std::max(cols_, rows_) + 1; ++ring) {
            bool any = false;
            for (int y = cy - ring; y <= cy + ring; ++y) {
                if (y < 0 || y >= rows_) continue;
                for (int x = cx - ring; x <= cx + ring; ++x) {
                    if (x < 0 || x >= cols_) continue;
                    if (std::max(std::abs(x - cx), std::abs(y - cy)) != ring) continue;
                    any = true;
                    for (int i : site_cells_[static_cast<size_t>(y) * cols_ + x]) {
                        const double d = (ox_[i] - qx) * (ox_[i] - qx) +
                                         (oy_[i] - qy) * (oy_[i] - qy);
                        if (d < bd) {
                            bd = d;
                            best = i;
                        }
                    }
                }
            }
            // One extra ring after the first hit guards against cell-boundary
            // effects; beyond that no closer site can exist.
            if (best >= 0 && ring > 0 &&
                (ring - 1) * cell_ > std::sqrt(bd)) break;
            if (!any && best >= 0) break;
        }
        return best;
    }

private:
    static void push_edge(std::vector<std::array<int, 2>>& edges, int a, int b) {
        for (auto& e : edges)
            if ((e[0] == a && e[1] == b) || (e[0] == b && e[1] == a)) {
                e[0] = -1;  // interior edge of the cavity: appears twice
                return;
            }
        edges.push_back({a, b});
    }

    std::array<int, 3> make_ccw(int a, int b, int c) const {
        const double area = (px_[b] - px_[a]) * (py_[c] - py_[a]) -
                            (py_[b] - py_[a]) * (px_[c] - px_[a]);
        return area >= 0 ? std::array<int, 3>{a, b, c} : std::array<int, 3>{a, c, b};
    }

    long double orient(int a, int b, int p) const {
        return ((long double)px_[b] - px_[a]) * ((long double)py_[p] - py_[a]) -
               ((long double)py_[b] - py_[a]) * ((long double)px_[p] - px_[a]);
    }

    // Circumcircle containment with the super-triangle vertices treated as
    // points at infinity. A finite super-triangle is not enough: circumcircles
    // of hull slivers can dwarf any fixed super-triangle, and getting their
    // containment wrong near the hull drops triangles from the final mesh.
    bool in_circumcircle(const std::array<int, 3>& t, int p) const {
        const int sv = static_cast<int>(ox_.size());
        int supers[3], reals[3], ns = 0, nr = 0;
        for (int v : t) (v >= sv ? supers[ns++] : reals[nr++]) = v;

        if (ns == 3) return true;  // initial triangle holds every real point
        if (ns == 2) {
            // Limit circle = half-plane through the real vertex with normal v
            // pointing at the receding circumcenter; v solves
            // v . d_i = |d_i|^2 / 2 for the two super directions d_i.
            // Directions: d0 = (-1,-.5), d1 = (1,-.5), d2 = (0,1).
            static constexpr double vx[3][3] = {{0, 0, -0.875}, {0, 0, 0.875}, {0, 0, 0}};
            static constexpr double vy[3][3] = {{0, -1.25, 0.5}, {-1.25, 0, 0.5}, {0, 0, 0}};
            const int i = std::min(supers[0], supers[1]) - sv;
            const int j = std::max(supers[0], supers[1]) - sv;
            const int a = reals[0];
            return vx[i][j] * (px_[p] - px_[a]) + vy[i][j] * (py_[p] - py_[a]) >= 0;
        }
        if (ns == 1) {
            // Limit circle = half-plane bounded by the real edge, on the side
            // of the receding super vertex.
            const long double side_s = orient(reals[0], reals[1], supers[0]);
            const long double side_p = orient(reals[0], reals[1], p);
            return side_p == 0 || (side_p > 0) == (side_s > 0);
        }

        const auto [a, b, c] = make_ccw(t[0], t[1], t[2]);
        const double ax = px_[a] - px_[p], ay = py_[a] - py_[p];
        const double bx = px_[b] - px_[p], by = py_[b] - py_[p];
        const double cx = px_[c] - px_[p], cy = py_[c] - py_[p];
        const long double t0 = ((long double)ax * ax + (long double)ay * ay) *
                               ((long double)bx * cy - (long double)cx * by);
        const long double t1 = ((long double)bx * bx + (long double)by * by) *
                               ((long double)ax * cy - (long double)cx * ay);
        const long double t2 = ((long double)cx * cx + (long double)cy * cy) *
                               ((long double)ax * by - (long double)bx * ay);
        return t0 - t1 + t2 > 0;
    }

    static bool bary(double ax, double ay, double bx, double by, double cx, double cy,
                     double qx, double qy, double& w0, double& w1, double& w2) {
        const double det = (bx - ax) * (cy - ay) - (cx - ax) * (by - ay);
        if (std::abs(det) < 1e-12) return false;
        w1 = ((qx - ax) * (cy - ay) - (cx - ax) * (qy - ay)) / det;
        w2 = ((bx - ax) * (qy - ay) - (qx - ax) * (by - ay)) / det;
        w0 = 1.0 - w1 - w2;
        return true;
    }

    int cols_ = 0, rows_ = 0;
    double cell_ = 1;
    std::array<double, 4> bbox_{};
    std::vector<double> ox_, oy_;  // original site coordinates
    std::vector<double> px_, py_;  // jittered + super-triangle vertices
    std::vector<std::array<int, 3>> tris_;
    std::vector<std::vector<int>> tri_cells_;
    std::vector<std::vector<int>> site_cells_;

    int cell_of_clamped(double v, double lo, int n) const {
        return std::clamp(static_cast<int>(std::floor((v - lo) / cell_)), 0, n - 1);
    }

    void build_grids() {
        const double w = std::max(bbox_[2] - bbox_[0], 1e-9);
        const double h = std::max(bbox_[3] - bbox_[1], 1e-9);
        const int target = std::max(1, static_cast<int>(std::sqrt(double(tris_.size()))));
        cell_ = std::max(w, h) / target;
        cols_ = std::max(1, static_cast<int>(std::ceil(w / cell_)));
        rows_ = std::max(1, static_cast<int>(std::ceil(h / cell_)));
        tri_cells_.assign(static_cast<size_t>(cols_) * rows_, {});
        site_cells_.assign(static_cast<size_t>(cols_) * rows_, {});
        for (size_t ti = 0; ti < tris_.size(); ++ti) {
            const auto& t = tris_[ti];
            const double x0 = std::min({px_[t[0]], px_[t[1]], px_[t[2]]});
            const double x1 = std::max({px_[t[0]], px_[t[1]], px_[t[2]]});
            const double y0 = std::min({py_[t[0]], py_[t[1]], py_[t[2]]});
            const double y1 = std::max({py_[t[0]], py_[t[1]], py_[t[2]]});
            for (int y = cell_of_clamped(y0, bbox_[1], rows_);
                 y <= cell_of_clamped(y1, bbox_[1], rows_); ++y)
                for (int x = cell_of_clamped(x0, bbox_[0], cols_);
                     x <= cell_of_clamped(x1, bbox_[0], cols_); ++x)
                    tri_cells_[static_cast<size_t>(y) * cols_ + x].push_back(
                        static_cast<int>(ti));
        }
        for (size_t i = 0; i < ox_.size(); ++i)
            site_cells_[static_cast<size_t>(cell_of_clamped(oy_[i], bbox_[1], rows_)) * cols_ +
                        cell_of_clamped(ox_[i], bbox_[0], cols_)]
                .push_back(static_cast<int>(i));
    }

    // Queries beyond the (jitter-padded) bounding box are outside the hull
    // (-1); queries within the pad are clamped into the edge cells.
    int cell_of(double v, double lo, int n) const {
        if (v < lo - 1e-5 || v > lo + n * cell_ + 1e-5) return -1;
        return std::clamp(static_cast<int>(std::floor((v - lo) / cell_)), 0, n - 1);
    }
};

// Two-channel scattered interpolant over left-image coordinates.
struct MappingField {
    Delaunay tri;
    std::vector<double> values_x, values_y;

    struct Eval {
        double x = 0, y = 0;
        bool extrapolated = false;
        double site_x = 0, site_y = 0;  // the nearest site, when extrapolated
    };

    MappingField(const std::vector<std::pair<double, double>>& sites,
                 std::vector<double> vx, std::vector<double> vy)
        : tri(sites), values_x(std::move(vx)), values_y(std::move(vy)) {
        require(values_x.size() == tri.site_count() && values_y.size() == tri.site_count(),
                "mapping: site/value length mismatch");
    }

    Eval operator()(double qx, double qy) const {
        const Delaunay::Location loc = tri.locate(qx, qy);
        Eval e;
        if (!loc.inside) {
            e.extrapolated = true;
            e.x = values_x[loc.nearest_site];
            e.y = values_y[loc.nearest_site];
            e.site_x = tri.site_x(loc.nearest_site);
            e.site_y = tri.site_y(loc.nearest_site);
            return e;
        }
        // Exact reproduction when the query coincides with a site.
        for (int k = 0; k < 3; ++k) {
            const int i = loc.vertices[k];
            if (std::abs(tri.site_x(i) - qx) < 1e-9 && std::abs(tri.site_y(i) - qy) < 1e-9) {
                e.x = values_x[i];
                e.y = values_y[i];
                return e;
            }
        }
        for (int k = 0; k < 3; ++k) {
            e.x += loc.weights[k] * values_x[loc.vertices[k]];
            e.y += loc.weights[k] * values_y[loc.vertices[k]];
        }
        return e;
    }
};

}  // namespace dotstereo
