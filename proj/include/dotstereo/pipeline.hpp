// End-to-end orchestration: extraction on both views, ROI alignment, block
// matching, iterative dot matching, triangulation, and evaluation against the
// synthetic ground truth.
#pragma once

#include <cmath>
#include <limits>
#include <string>

#include "dotstereo/extraction.hpp"
#include "dotstereo/geometry.hpp"
#include "dotstereo/matching.hpp"
#include "dotstereo/metrics.hpp"
#include "dotstereo/synth.hpp"

namespace dotstereo {

struct PipelineConfig {
    ExtractionConfig extraction{};
    MatchConfig match{};
    TriangulationMethod method = TriangulationMethod::Analytic;
    double residual_gate_mm = 5.0;
    double accuracy_tol_px = 1.0;  // ground-truth association tolerance

    void validate() const {
        extraction.sdd.validate();
        require(match.roi_delta > 0 && match.dot_delta > 0, "pipeline: windows must be positive");
        require(match.gate_factor > 0 && residual_gate_mm > 0, "pipeline: gates must be positive");
        require(match.max_iterations > 0, "pipeline: max_iterations must be positive");
    }
};

struct PipelineResult {
    DotSet left_dots, right_dots;
    ExtractionArtifacts left_art, right_art;
    RoiAlignment alignment;
    std::vector<BlockMatch> green_blocks, blue_blocks;
    CorrespondenceSet corr;
    int cycles = 0;
    bool converged = false;
    size_t seed_pairs = 0;
    PointCloud cloud;
};

inline PipelineResult run_pipeline(const RgbImage& left, const RgbImage& right,
                                   const CameraModel& cam_left, const CameraModel& cam_right,
                                   const PipelineConfig& cfg = {}) {
    cfg.validate();
    PipelineResult res;
    {
        auto [dots, art] = extract(left, cfg.extraction, "left");
        res.left_dots = std::move(dots);
        res.left_art = std::move(art);
    }
    {
        auto [dots, art] = extract(right, cfg.extraction, "right");
        res.right_dots = std::move(dots);
        res.right_art = std::move(art);
    }
    res.alignment = align_rois(res.left_art.roi, res.right_art.roi, cfg.match.roi_delta);
    constexpr int G = static_cast<int>(DotColor::Green);
    constexpr int B = static_cast<int>(DotColor::Blue);
    res.green_blocks = match_blocks(res.left_art.closed_class_masks[G],
                                    res.right_art.closed_class_masks[G], res.alignment);
    res.blue_blocks = match_blocks(res.left_art.closed_class_masks[B],
                                   res.right_art.closed_class_masks[B], res.alignment);
    IterativeMatchResult m = iterative_match(res.left_dots, res.right_dots, res.green_blocks,
                                             res.blue_blocks, res.alignment, cfg.match);
    res.corr = std::move(m.corr);
    res.cycles = m.cycles;
    res.converged = m.converged;
    res.seed_pairs = m.seed_pairs;
    res.cloud = reconstruct(res.corr, cam_left, cam_right, cfg.method, cfg.residual_gate_mm);
    return res;
}

// RMS 3D error of the cloud against the ground truth, associating each
// reconstructed point with a covisible dot through its left-image projection.
// Points whose endpoints match no ground-truth dot within `tol` px count as
// unassociated and are skipped (they are precision errors, not 3D errors).
inline double cloud_rmse(const PointCloud& cloud, const CorrespondenceSet& corr,
                         const GroundTruth& gt, double tol = 1.0) {
    std::vector<double> gx, gy;
    for (int gi : gt.covisible) {
        gx.push_back(gt.visible_left[gi].x);
        gy.push_back(gt.visible_left[gi].y);
    }
    if (gx.empty() || cloud.points.empty()) return std::numeric_limits<double>::quiet_NaN();
    const detail::PointGrid grid(gx, gy, std::max(tol * 4, 8.0));
    double ss = 0;
    int n = 0;
    std::vector<int> hits;
    for (const CloudPoint& p : cloud.points) {
        if (p.pair_index < 0) continue;
        const CorrespondencePair& pr = corr.pairs[p.pair_index];
        const Dot& dl = corr.left.dots[pr.left];
        const Dot& dr = corr.right.dots[pr.right];
        grid.query(dl.x, dl.y, tol, hits);
        for (int h : hits) {
            const int gi = gt.covisible[h];
            if (std::hypot(gt.visible_right[gi].x - dr.x, gt.visible_right[gi].y - dr.y) > tol)
                continue;
            const Vec3 d = p.position - gt.dots3d[gi].position;
            ss += d.dot(d);
            ++n;
            break;
        }
    }
    return n ? std::sqrt(ss / n) : std::numeric_limits<double>::quiet_NaN();
}

struct EvalReport {
    double match_precision = 0;
    double match_recall = 0;
    double rmse3d = std::numeric_limits<double>::quiet_NaN();  // mm, vs dots3d
    // Marker-grid scenes.
    double marker_mse = std::numeric_limits<double>::quiet_NaN();   // mm^2
    double marker_rmse = std::numeric_limits<double>::quiet_NaN();  // mm
    // Sphere scenes.
    double fitted_radius = std::numeric_limits<double>::quiet_NaN();  // mm
    double md = std::numeric_limits<double>::quiet_NaN();             // mm
    size_t points = 0;
    int dropped = 0;
    int cycles = 0;
    bool converged = false;
    std::string warning;
};

// Reconstruct the marker positions by sampling the cloud's piecewise-linear
// z(x, y) field at each ground-truth marker's lateral position.
inline std::vector<Vec3> reconstruct_markers(const PointCloud& cloud,
                                             const std::vector<Vec3>& markers) {
    require(cloud.points.size() >= 3, "mapping underdetermined");
    std::vector<std::pair<double, double>> sites;
    std::vector<double> vz;
    for (const CloudPoint& p : cloud.points) {
        sites.emplace_back(p.position.x, p.position.y);
        vz.push_back(p.position.z);
    }
    const MappingField field(sites, vz, std::vector<double>(vz.size(), 0.0));
    std::vector<Vec3> out;
    for (const Vec3& m : markers) out.push_back({m.x, m.y, field(m.x, m.y).x});
    return out;
}

inline EvalReport evaluate_pipeline(const SceneSpec& scene, const PatternSpec& pattern,
                                    const PipelineConfig& cfg = {}) {
    const StereoRender render = render_stereo(scene, pattern);
    const PipelineResult res =
        run_pipeline(render.left, render.right, scene.left, scene.right, cfg);

    EvalReport rep;
    rep.points = res.cloud.points.size();
    rep.dropped = res.cloud.dropped;
    rep.cycles = res.cycles;
    rep.converged = res.converged;
    rep.warning = res.cloud.warning;
    std::tie(rep.match_precision, rep.match_recall) =
        match_accuracy(res.corr, render.truth, cfg.accuracy_tol_px);
    rep.rmse3d = cloud_rmse(res.cloud, res.corr, render.truth, cfg.accuracy_tol_px);

    if (scene.surface.type == SurfaceType::MarkerGrid && res.cloud.points.size() >= 3) {
        const std::vector<Vec3> truth = marker_points(scene);
        const MarkerError e = marker_mse(reconstruct_markers(res.cloud, truth), truth);
        rep.marker_mse = e.mse;
        rep.marker_rmse = e.rmse;
    }
    if (scene.surface.type == SurfaceType::Sphere && res.cloud.points.size() >= 10) {
        const SphereFit fit = fit_sphere(res.cloud);
        rep.fitted_radius = fit.radius;
        rep.md = mean_distance(res.cloud, fit);
    }
    return rep;
}

}  // namespace dotstereo
