// dotstereo: command-line surface for the block-dot stereo pipeline.
//
// Subcommands: pattern, render, extract, match, reconstruct, evaluate,
// pipeline. Exit codes: 0 success, 1 usage error, 2 data/pipeline error.
// Every output file is written atomically (temp + rename).

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "dotstereo/io_png.hpp"
#include "dotstereo/pipeline.hpp"
#include "dotstereo/serialize.hpp"

namespace ds = dotstereo;
namespace fs = std::filesystem;

namespace {

void write_png_atomic(const std::string& path, const auto& image) {
    const std::string tmp = path + ".tmp";
    ds::write_png(tmp, image);
    std::error_code ec;
    fs::rename(tmp, path, ec);
    ds::require(!ec, path + ": rename failed: " + ec.message());
}

ds::Json load_json(const std::string& path, const std::string& what) {
    return ds::detail::parse_json(ds::read_text(path), what + " (" + path + ")");
}

// ---------------------------------------------------------------------------
// Mask reconstruction from a dot set, for matching straight from JSON files.
// Dots become disks of half the lattice spacing: adjacent dots touch, so the
// closed ROI / per-color block components match the extraction-time masks.

struct DotSetMasks {
    ds::BinaryMask roi;
    std::array<ds::BinaryMask, 3> class_masks;
};

void stamp_disk(ds::BinaryMask& m, double cx, double cy, double r) {
    const int x0 = std::max(0, static_cast<int>(std::floor(cx - r)));
    const int x1 = std::min(m.width - 1, static_cast<int>(std::ceil(cx + r)));
    const int y0 = std::max(0, static_cast<int>(std::floor(cy - r)));
    const int y1 = std::min(m.height - 1, static_cast<int>(std::ceil(cy + r)));
    for (int y = y0; y <= y1; ++y)
        for (int x = x0; x <= x1; ++x)
            if ((x - cx) * (x - cx) + (y - cy) * (y - cy) <= r * r) m.at(x, y) = 1;
}

// Rebuilds ROI and per-color class masks and relabels each dot's block with
// the component label of its own mask, so labels are self-consistent.
DotSetMasks masks_from_dots(ds::DotSet& set) {
    ds::require(set.width > 0 && set.height > 0, set.source + " dots: missing image size");
    ds::require(set.dots.size() >= 2, set.source + " dots: too few dots");
    std::vector<double> xs, ys;
    for (const ds::Dot& d : set.dots) {
        xs.push_back(d.x);
        ys.push_back(d.y);
    }
    const double spacing = ds::detail::median_nn_spacing(xs, ys);
    ds::require(spacing < 1e300, set.source + " dots: degenerate spacing");
    const double r = spacing / 2 + 1;  // adjacent disks overlap

    DotSetMasks m;
    m.roi = ds::BinaryMask(set.width, set.height);
    for (int c = 0; c < 3; ++c) m.class_masks[c] = ds::BinaryMask(set.width, set.height);
    for (const ds::Dot& d : set.dots) {
        stamp_disk(m.roi, d.x, d.y, r);
        stamp_disk(m.class_masks[static_cast<int>(d.color)], d.x, d.y, r);
    }
    m.roi = ds::fill_holes(m.roi);

    std::array<ds::LabeledImage, 3> labels;
    for (int c = 0; c < 3; ++c) labels[c] = ds::connected_components(m.class_masks[c]);
    for (ds::Dot& d : set.dots) {
        const int x = std::clamp(static_cast<int>(std::lround(d.x)), 0, set.width - 1);
        const int y = std::clamp(static_cast<int>(std::lround(d.y)), 0, set.height - 1);
        d.block = labels[static_cast<int>(d.color)].at(x, y);
    }
    return m;
}

// ---------------------------------------------------------------------------
// Subcommand bodies. Each throws std::runtime_error on data errors.

void cmd_pattern(const std::string& spec_path, const std::string& out_path) {
    const ds::PatternSpec spec = ds::pattern_spec_from_json(load_json(spec_path, "pattern spec"));
    write_png_atomic(out_path, ds::generate_pattern(spec));
}

void cmd_render(const std::string& scene_path, const std::string& pattern_path,
                const std::string& out_left, const std::string& out_right,
                const std::string& out_gt, const std::string& out_calib) {
    const ds::SceneSpec scene = ds::scene_from_json(load_json(scene_path, "scene"));
    const ds::PatternSpec pattern =
        ds::pattern_spec_from_json(load_json(pattern_path, "pattern spec"));
    const ds::StereoRender render = ds::render_stereo(scene, pattern);
    write_png_atomic(out_left, render.left);
    write_png_atomic(out_right, render.right);
    ds::write_text_atomic(out_gt, ds::json_text(ds::to_json(render.truth)));
    if (!out_calib.empty())
        ds::write_text_atomic(out_calib,
                              ds::json_text(ds::to_json(ds::StereoCalibration{scene.left,
                                                                              scene.right})));
}

void cmd_extract(const std::string& image_path, const std::string& out_path,
                 const std::string& debug_dir, const ds::ExtractionConfig& cfg) {
    const ds::RgbImage img = ds::read_image(image_path);
    auto [dots, art] = ds::extract(img, cfg, fs::path(image_path).stem().string());
    ds::write_text_atomic(out_path, ds::json_text(ds::to_json(dots)));
    if (!debug_dir.empty()) {
        fs::create_directories(debug_dir);
        const fs::path dir(debug_dir);
        write_png_atomic((dir / "roi.png").string(), art.roi);
        write_png_atomic((dir / "class_red.png").string(), art.class_masks[0]);
        write_png_atomic((dir / "class_green.png").string(), art.class_masks[1]);
        write_png_atomic((dir / "class_blue.png").string(), art.class_masks[2]);
        write_png_atomic((dir / "detect.png").string(), art.detect_mask);
        write_png_atomic((dir / "vprime.png").string(), art.vprime);
    }
}

void cmd_match(const std::string& left_path, const std::string& right_path,
               const std::string& out_path, const std::string& csv_path,
               const ds::MatchConfig& cfg) {
    ds::DotSet left = ds::dotset_from_json(load_json(left_path, "left dot set"));
    ds::DotSet right = ds::dotset_from_json(load_json(right_path, "right dot set"));
    const DotSetMasks ml = masks_from_dots(left);
    const DotSetMasks mr = masks_from_dots(right);
    const ds::RoiAlignment align = ds::align_rois(ml.roi, mr.roi, cfg.roi_delta);
    constexpr int G = static_cast<int>(ds::DotColor::Green);
    constexpr int B = static_cast<int>(ds::DotColor::Blue);
    const auto green = ds::match_blocks(ml.class_masks[G], mr.class_masks[G], align);
    const auto blue = ds::match_blocks(ml.class_masks[B], mr.class_masks[B], align);
    const ds::IterativeMatchResult m = ds::iterative_match(left, right, green, blue, align, cfg);
    ds::write_text_atomic(out_path, ds::json_text(ds::to_json(m.corr)));
    if (!csv_path.empty()) ds::write_text_atomic(csv_path, ds::correspondences_to_csv(m.corr));
}

void cmd_reconstruct(const std::string& corr_path, const std::string& calib_path,
                     const std::string& method, const std::string& out_path,
                     double residual_gate, double upsample, const std::string& grid_path) {
    const ds::CorrespondenceSet corr =
        ds::correspondences_from_json(load_json(corr_path, "correspondence set"));
    const ds::StereoCalibration calib =
        ds::calibration_from_json(load_json(calib_path, "calibration"));
    ds::PointCloud cloud;
    if (method == "disparity") {
        cloud = ds::reconstruct_disparity(corr, calib.left, calib.right);
    } else {
        const auto m = method == "midpoint" ? ds::TriangulationMethod::Midpoint
                                            : ds::TriangulationMethod::Analytic;
        cloud = ds::reconstruct(corr, calib.left, calib.right, m, residual_gate);
    }
    ds::require(cloud.warning.empty(), cloud.warning);
    ds::write_text_atomic(out_path, ds::cloud_to_ply(cloud));
    if (upsample > 0) {
        ds::require(!grid_path.empty(), "--upsample requires --out-grid");
        ds::write_text_atomic(grid_path, ds::grid_to_csv(ds::upsample_surface(cloud, upsample)));
    }
}

void cmd_evaluate(const std::string& scene_path, const std::string& pattern_path,
                  const std::string& out_path, const ds::PipelineConfig& cfg) {
    const ds::SceneSpec scene = ds::scene_from_json(load_json(scene_path, "scene"));
    const ds::PatternSpec pattern =
        ds::pattern_spec_from_json(load_json(pattern_path, "pattern spec"));
    const ds::EvalReport rep = ds::evaluate_pipeline(scene, pattern, cfg);
    ds::write_text_atomic(out_path, ds::json_text(ds::to_json(rep)));
}

void cmd_pipeline(const std::string& scene_path, const std::string& pattern_path,
                  const std::string& out_dir, const ds::PipelineConfig& cfg) {
    const ds::SceneSpec scene = ds::scene_from_json(load_json(scene_path, "scene"));
    const ds::PatternSpec pattern =
        ds::pattern_spec_from_json(load_json(pattern_path, "pattern spec"));
    fs::create_directories(out_dir);
    const fs::path dir(out_dir);

    std::string stage = "render";
    try {
        const ds::StereoRender render = ds::render_stereo(scene, pattern);
        write_png_atomic((dir / "left.png").string(), render.left);
        write_png_atomic((dir / "right.png").string(), render.right);
        ds::write_text_atomic((dir / "ground_truth.json").string(),
                              ds::json_text(ds::to_json(render.truth)));
        ds::write_text_atomic(
            (dir / "calibration.json").string(),
            ds::json_text(ds::to_json(ds::StereoCalibration{scene.left, scene.right})));

        stage = "extract+match+reconstruct";
        const ds::PipelineResult res =
            ds::run_pipeline(render.left, render.right, scene.left, scene.right, cfg);
        ds::write_text_atomic((dir / "dots_left.json").string(),
                              ds::json_text(ds::to_json(res.left_dots)));
        ds::write_text_atomic((dir / "dots_right.json").string(),
                              ds::json_text(ds::to_json(res.right_dots)));
        ds::write_text_atomic((dir / "correspondences.json").string(),
                              ds::json_text(ds::to_json(res.corr)));
        ds::write_text_atomic((dir / "correspondences.csv").string(),
                              ds::correspondences_to_csv(res.corr));
        ds::write_text_atomic((dir / "cloud.ply").string(), ds::cloud_to_ply(res.cloud));

        stage = "evaluate";
        const ds::EvalReport rep = ds::evaluate_pipeline(scene, pattern, cfg);
        ds::write_text_atomic((dir / "report.json").string(), ds::json_text(ds::to_json(rep)));
    } catch (const std::exception& e) {
        throw std::runtime_error("stage " + stage + ": " + e.what());
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Single-shot block-dot stereo: pattern generation, synthetic rendering, "
                 "extraction, matching, reconstruction, evaluation."};
    app.require_subcommand(1);

    ds::PipelineConfig cfg;
    std::string spec_path, out_path, scene_path, pattern_path;
    std::string out_left, out_right, out_gt, out_calib;
    std::string image_path, debug_dir;
    std::string left_path, right_path, csv_path;
    std::string corr_path, calib_path, grid_path, out_dir;
    std::string method = "analytic";
    double upsample = 0;

    CLI::App* pat = app.add_subcommand("pattern", "Generate the RGB block-dot pattern PNG");
    pat->add_option("--spec", spec_path, "PatternSpec JSON")->required();
    pat->add_option("--out", out_path, "output PNG")->required();

    CLI::App* ren = app.add_subcommand("render", "Render a synthetic stereo pair + ground truth");
    ren->add_option("--scene", scene_path, "SceneSpec JSON")->required();
    ren->add_option("--pattern", pattern_path, "PatternSpec JSON")->required();
    ren->add_option("--out-left", out_left, "left image PNG")->required();
    ren->add_option("--out-right", out_right, "right image PNG")->required();
    ren->add_option("--out-gt", out_gt, "ground-truth JSON")->required();
    ren->add_option("--out-calib", out_calib, "stereo calibration JSON (optional)");

    CLI::App* ext = app.add_subcommand("extract", "Extract colored dots from an image");
    ext->add_option("--image", image_path, "input PNG or PPM P6")->required();
    ext->add_option("--out", out_path, "DotSet JSON")->required();
    ext->add_option("--debug-masks", debug_dir, "directory for the six stage masks");
    ext->add_flag("--box-filter", cfg.extraction.use_box_filter,
                  "box filter instead of the morphological opening");

    CLI::App* mat = app.add_subcommand("match", "Match two extracted dot sets");
    mat->add_option("--left", left_path, "left DotSet JSON")->required();
    mat->add_option("--right", right_path, "right DotSet JSON")->required();
    mat->add_option("--out", out_path, "CorrespondenceSet JSON")->required();
    mat->add_option("--csv", csv_path, "also export CSV (lx,ly,rx,ry,color)");
    mat->add_option("--roi-delta", cfg.match.roi_delta, "ROI alignment window, +- px");
    mat->add_option("--dot-delta", cfg.match.dot_delta, "intra-block shift window, +- px");
    mat->add_option("--gate-factor", cfg.match.gate_factor, "match gate x median spacing");
    mat->add_option("--max-iterations", cfg.match.max_iterations, "refinement cycle cap");

    CLI::App* rec = app.add_subcommand("reconstruct", "Triangulate correspondences to a cloud");
    rec->add_option("--corr", corr_path, "CorrespondenceSet JSON")->required();
    rec->add_option("--calib", calib_path, "calibration JSON")->required();
    rec->add_option("--method", method, "analytic | midpoint | disparity")
        ->check(CLI::IsMember({"analytic", "midpoint", "disparity"}));
    rec->add_option("--out", out_path, "output ASCII PLY")->required();
    rec->add_option("--residual-gate", cfg.residual_gate_mm, "max ray-ray residual, mm");
    rec->add_option("--upsample", upsample, "resample onto a uniform grid, spacing in mm");
    rec->add_option("--out-grid", grid_path, "SurfaceGrid CSV (with --upsample)");

    CLI::App* eva = app.add_subcommand("evaluate", "Render a scene, run the pipeline, report");
    eva->add_option("--scene", scene_path, "SceneSpec JSON")->required();
    eva->add_option("--pattern", pattern_path, "PatternSpec JSON")->required();
    eva->add_option("--out", out_path, "EvalReport JSON")->required();

    CLI::App* pip = app.add_subcommand("pipeline", "End-to-end: render through report");
    pip->add_option("--scene", scene_path, "SceneSpec JSON")->required();
    pip->add_option("--pattern", pattern_path, "PatternSpec JSON")->required();
    pip->add_option("--out-dir", out_dir, "output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return 1;
    }

    try {
        if (pat->parsed()) cmd_pattern(spec_path, out_path);
        if (ren->parsed())
            cmd_render(scene_path, pattern_path, out_left, out_right, out_gt, out_calib);
        if (ext->parsed()) cmd_extract(image_path, out_path, debug_dir, cfg.extraction);
        if (mat->parsed()) cmd_match(left_path, right_path, out_path, csv_path, cfg.match);
        if (rec->parsed())
            cmd_reconstruct(corr_path, calib_path, method, out_path, cfg.residual_gate_mm,
                            upsample, grid_path);
        if (eva->parsed()) cmd_evaluate(scene_path, pattern_path, out_path, cfg);
        if (pip->parsed()) cmd_pipeline(scene_path, pattern_path, out_dir, cfg);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
