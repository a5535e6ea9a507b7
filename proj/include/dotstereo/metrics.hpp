// Quantitative evaluation: grid-marker MSE/RMSE, sphere fitting with mean
// distance to the fitted surface, and correspondence accuracy against the
// synthetic ground truth.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "dotstereo/geometry.hpp"
#include "dotstereo/matching.hpp"
#include "dotstereo/synth.hpp"

namespace dotstereo {

struct SphereFit {
    Vec3 center;
    double radius = 0;
    double rms_residual = 0;  // mm
};

struct MarkerError {
    double mse = 0;   // mm^2
    double rmse = 0;  // mm
    std::string warning;
};

namespace detail {

// Solve the n x n system in place by Gaussian elimination with partial
// pivoting; returns false when (near-)singular.
template <int N>
inline bool solve_linear(std::array<std::array<double, N>, N>& a, std::array<double, N>& b) {
    for (int col = 0; col < N; ++col) {
        int piv = col;
        for (int r = col + 1; r < N; ++r)
            if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
        if (std::abs(a[piv][col]) < 1e-9) return false;
        std::swap(a[col], a[piv]);
        std::swap(b[col], b[piv]);
        for (int r = 0; r < N; ++r) {
            if (r == col) continue;
            const double f = a[r][col] / a[col][col];
            for (int c = col; c < N; ++c) a[r][c] -= f * a[col][c];
            b[r] -= f * b[col];
        }
    }
    for (int i = 0; i < N; ++i) b[i] /= a[i][i];
    return true;
}

}  // namespace detail

// Mean squared Euclidean distance between index-aligned point sets; the rmse
// is reported alongside since accuracy targets are lengths. Designed for the
// 25-marker grid; other counts degrade to a generalized mean with a warning.
inline MarkerError marker_mse(const std::vector<Vec3>& recon, const std::vector<Vec3>& truth) {
    require(recon.size() == truth.size() && !recon.empty(), "marker sets differ in size");
    MarkerError e;
    if (recon.size() != 25) e.warning = "marker count is not 25; generalized mean reported";
    for (size_t i = 0; i < recon.size(); ++i) {
        const Vec3 d = recon[i] - truth[i];
        e.mse += d.dot(d);
    }
    e.mse /= static_cast<double>(recon.size());
    e.rmse = std::sqrt(e.mse);
    return e;
}

// Algebraic least squares on x^2+y^2+z^2 = 2 c.x + k seeded into 20
// Gauss-Newton steps on the geometric distance.
inline SphereFit fit_sphere(const PointCloud& cloud) {
    require(cloud.points.size() >= 10, "sphere fit degenerate");
    std::array<std::array<double, 4>, 4> ata{};
    std::array<double, 4> atb{};
    for (const CloudPoint& p : cloud.points) {
        const std::array<double, 4> row{2 * p.position.x, 2 * p.position.y, 2 * p.position.z, 1};
        const double b = p.position.dot(p.position);
        for (int i = 0; i < 4; ++i) {
            for (int j = 0; j < 4; ++j) ata[i][j] += row[i] * row[j];
            atb[i] += row[i] * b;
        }
    }
    // Normalize so the singularity threshold is scale-independent.
    const double scale = std::max(1.0, std::abs(ata[3][3]));
    for (auto& r : ata)
        for (auto& v : r) v /= scale;
    for (auto& v : atb) v /= scale;
    require(detail::solve_linear<4>(ata, atb), "sphere fit degenerate");

    SphereFit fit;
    fit.center = {atb[0], atb[1], atb[2]};
    const double r2 = atb[3] + fit.center.dot(fit.center);
    require(r2 > 0, "sphere fit degenerate");
    fit.radius = std::sqrt(r2);

    for (int step = 0; step < 20; ++step) {
        std::array<std::array<double, 4>, 4> jtj{};
        std::array<double, 4> jtr{};
        for (const CloudPoint& p : cloud.points) {
            const Vec3 d = p.position - fit.center;
            const double n = d.norm();
            if (n < 1e-12) continue;
            const double res = n - fit.radius;
            const std::array<double, 4> j{-d.x / n, -d.y / n, -d.z / n, -1};
            for (int i = 0; i < 4; ++i) {
                for (int k = 0; k < 4; ++k) jtj[i][k] += j[i] * j[k];
                jtr[i] += j[i] * res;
            }
        }
        for (auto& v : jtr) v = -v;
        if (!detail::solve_linear<4>(jtj, jtr)) break;
        fit.center = fit.center + Vec3{jtr[0], jtr[1], jtr[2]};
        fit.radius += jtr[3];
    }
    require(fit.radius > 0, "sphere fit degenerate");

    double ss = 0;
    for (const CloudPoint& p : cloud.points) {
        const double r = (p.position - fit.center).norm() - fit.radius;
        ss += r * r;
    }
    fit.rms_residual = std::sqrt(ss / static_cast<double>(cloud.points.size()));
    return fit;
}

// Mean unsigned geometric distance between the points and the fitted sphere.
inline double mean_distance(const PointCloud& cloud, const SphereFit& fit) {
    require(!cloud.points.empty(), "empty cloud");
    double sum = 0;
    for (const CloudPoint& p : cloud.points)
        sum += std::abs((p.position - fit.center).norm() - fit.radius);
    return sum / static_cast<double>(cloud.points.size());
}

// A pair is correct iff both of its endpoints land within `tol` px of the
// same covisible ground-truth dot's projections.
inline std::pair<double, double> match_accuracy(const CorrespondenceSet& corr,
                                                const GroundTruth& gt, double tol = 1.0) {
    if (corr.pairs.empty() || gt.covisible.empty()) return {0.0, 0.0};

    std::vector<double> gx, gy;
    for (int gi : gt.covisible) {
        gx.push_back(gt.visible_left[gi].x);
        gy.push_back(gt.visible_left[gi].y);
    }
    const detail::PointGrid grid(gx, gy, std::max(tol * 4, 8.0));

    int correct = 0;
    std::vector<int> hits;
    for (const CorrespondencePair& p : corr.pairs) {
        const Dot& dl = corr.left.dots[p.left];
        const Dot& dr = corr.right.dots[p.right];
        grid.query(dl.x, dl.y, tol, hits);
        for (int h : hits) {
            const int gi = gt.covisible[h];
            if (std::hypot(gt.visible_right[gi].x - dr.x, gt.visible_right[gi].y - dr.y) <= tol) {
                ++correct;
                break;
            }
        }
    }
    return {correct / static_cast<double>(corr.pairs.size()),
            correct / static_cast<double>(gt.covisible.size())};
}

}  // namespace dotstereo
