// Stereo matching: ROI alignment by maximum overlap, block matching by
// label-concatenation overlap voting, intra-block dot matching, scattered-data
// mapping fits, and the iterative three-color refinement loop.
#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <unordered_map>
#include <vector>

#include "dotstereo/delaunay.hpp"
#include "dotstereo/dotset.hpp"
#include "dotstereo/filters.hpp"
#include "dotstereo/image.hpp"

namespace dotstereo {

struct RoiAlignment {
    double base_shift = 0;  // |x_c^r - x_c^l| from the mask centroids, px
    int delta = 0;          // overlap-maximizing integer correction
    int total_shift = 0;    // round(base_shift) + delta; left shifts left by this
};

struct BlockMatch {
    int left_label = 0;
    int right_label = 0;
    long long overlap = 0;  // shared pixels after shifting
};

struct MatchConfig {
    int roi_delta = 10;        // alignment search window, +- px
    int dot_delta = 5;         // intra-block residual shift window, +- px
    double gate_factor = 0.5;  // gate = factor x median nearest-neighbor spacing
    int max_iterations = 20;
    int max_field_sites = 1200;  // fit fields are built on at most this many pairs
};

namespace detail {

// Horizontal runs [start, end) of set pixels, one list per row.
inline std::vector<std::vector<std::pair<int, int>>> row_runs(const BinaryMask& m) {
    std::vector<std::vector<std::pair<int, int>>> runs(m.height);
    for (int y = 0; y < m.height; ++y) {
        int x = 0;
        while (x < m.width) {
            if (!m.at(x, y)) {
                ++x;
                continue;
            }
            int e = x + 1;
            while (e < m.width && m.at(e, y)) ++e;
            runs[y].emplace_back(x, e);
            x = e;
        }
    }
    return runs;
}

// Overlap pixel count between the right mask and the left mask shifted left
// by `shift` px, computed on run lists.
inline long long run_overlap(const std::vector<std::vector<std::pair<int, int>>>& left,
                             const std::vector<std::vector<std::pair<int, int>>>& right,
                             int shift) {
    long long total = 0;
    const size_t rows = std::min(left.size(), right.size());
    for (size_t y = 0; y < rows; ++y) {
        size_t i = 0, j = 0;
        while (i < left[y].size() && j < right[y].size()) {
            const int la = left[y][i].first - shift, lb = left[y][i].second - shift;
            const int ra = right[y][j].first, rb = right[y][j].second;
            total += std::max(0, std::min(lb, rb) - std::max(la, ra));
            if (lb < rb)
                ++i;
            else
                ++j;
        }
    }
    return total;
}

inline double centroid_x(const BinaryMask& m) {
    double sx = 0;
    long long n = 0;
    for (int y = 0; y < m.height; ++y)
        for (int x = 0; x < m.width; ++x)
            if (m.at(x, y)) {
                sx += x;
                ++n;
            }
    require(n > 0, "empty ROI");
    return sx / static_cast<double>(n);
}

// Uniform-grid point index for nearest-neighbor queries over dot coordinates.
class PointGrid {
public:
    PointGrid(const std::vector<double>& xs, const std::vector<double>& ys, double cell)
        : xs_(xs), ys_(ys), cell_(std::max(cell, 1e-9)) {
        if (xs.empty()) return;
        lo_x_ = *std::min_element(xs.begin(), xs.end());
        lo_y_ = *std::min_element(ys.begin(), ys.end());
        const double hi_x = *std::max_element(xs.begin(), xs.end());
        const double hi_y = *std::max_element(ys.begin(), ys.end());
        cols_ = static_cast<int>(std::floor((hi_x - lo_x_) / cell_)) + 1;
        rows_ = static_cast<int>(std::floor((hi_y - lo_y_) / cell_)) + 1;
        cells_.assign(static_cast<size_t>(cols_) * rows_, {});
        for (size_t i = 0; i < xs.size(); ++i)
            cells_[cell_index(xs[i], ys[i])].push_back(static_cast<int>(i));
    }

    // Indices of all points within `radius` of (qx, qy).
    void query(double qx, double qy, double radius, std::vector<int>& out) const {
        out.clear();
        if (xs_.empty()) return;
        const int r = static_cast<int>(std::ceil(radius / cell_));
        const int cx = col_of(qx), cy = row_of(qy);
        for (int y = std::max(0, cy - r); y <= std::min(rows_ - 1, cy + r); ++y)
            for (int x = std::max(0, cx - r); x <= std::min(cols_ - 1, cx + r); ++x)
                for (int i : cells_[static_cast<size_t>(y) * cols_ + x]) {
                    const double dx = xs_[i] - qx, dy = ys_[i] - qy;
                    if (dx * dx + dy * dy <= radius * radius) out.push_back(i);
                }
    }

    // Distance to the nearest point other than `self` (-1 disables exclusion).
    double nearest_distance(double qx, double qy, int self = -1) const {
        if (xs_.empty()) return 1e300;
        double best = 1e300;
        for (int ring = 0;; ++ring) {
            const int cx = col_of(qx), cy = row_of(qy);
            bool any = false;
            for (int y = cy - ring; y <= cy + ring; ++y) {
                if (y < 0 || y >= rows_) continue;
                for (int x = cx - ring; x <= cx + ring; ++x) {
                    if (x < 0 || x >= cols_) continue;
                    if (std::max(std::abs(x - cx), std::abs(y - cy)) != ring) continue;
                    any = true;
                    for (int i : cells_[static_cast<size_t>(y) * cols_ + x]) {
                        if (i == self) continue;
                        const double dx = xs_[i] - qx, dy = ys_[i] - qy;
                        best = std::min(best, dx * dx + dy * dy);
                    }
                }
            }
            if (best < 1e300 && static_cast<double>(ring - 1) * cell_ > std::sqrt(best)) break;
            if (!any && ring > std::max(cols_, rows_)) break;
        }
        return std::sqrt(best);
    }

private:
    int col_of(double x) const { return std::clamp(static_cast<int>(std::floor((x - lo_x_) / cell_)), 0, cols_ - 1); }
    int row_of(double y) const { return std::clamp(static_cast<int>(std::floor((y - lo_y_) / cell_)), 0, rows_ - 1); }
    size_t cell_index(double x, double y) const {
        return static_cast<size_t>(row_of(y)) * cols_ + col_of(x);
    }

    std::vector<double> xs_, ys_;
    double cell_ = 1, lo_x_ = 0, lo_y_ = 0;
    int cols_ = 1, rows_ = 1;
    std::vector<std::vector<int>> cells_;
};

// Median distance from each point to its nearest neighbor in the same list.
inline double median_nn_spacing(const std::vector<double>& xs, const std::vector<double>& ys) {
    if (xs.size() < 2) return 1e300;
    const double lo_x = *std::min_element(xs.begin(), xs.end());
    const double hi_x = *std::max_element(xs.begin(), xs.end());
    const double lo_y = *std::min_element(ys.begin(), ys.end());
    const double hi_y = *std::max_element(ys.begin(), ys.end());
    const double area = std::max((hi_x - lo_x) * (hi_y - lo_y), 1.0);
    const PointGrid grid(xs, ys, std::sqrt(area / static_cast<double>(xs.size())));
    std::vector<double> nn(xs.size());
    for (size_t i = 0; i < xs.size(); ++i)
        nn[i] = grid.nearest_distance(xs[i], ys[i], static_cast<int>(i));
    std::nth_element(nn.begin(), nn.begin() + nn.size() / 2, nn.end());
    return nn[nn.size() / 2];
}

struct Candidate {
    double dist;
    int left, right;
    bool operator<(const Candidate& o) const {
        if (dist != o.dist) return dist < o.dist;
        if (left != o.left) return left < o.left;
        return right < o.right;
    }
};

// Deterministic greedy one-to-one assignment by ascending distance.
inline std::vector<std::pair<int, int>> greedy_assign(std::vector<Candidate> cands, int n_left,
                                                      int n_right) {
    std::sort(cands.begin(), cands.end());
    std::vector<char> used_l(n_left, 0), used_r(n_right, 0);
    std::vector<std::pair<int, int>> pairs;
    for (const Candidate& c : cands) {
        if (used_l[c.left] || used_r[c.right]) continue;
        used_l[c.left] = used_r[c.right] = 1;
        pairs.emplace_back(c.left, c.right);
    }
    return pairs;
}

}  // namespace detail

// Horizontal alignment of the two ROIs: centroid difference plus the integer
// correction in [-roi_delta, roi_delta] maximizing mask overlap (ties go to
// the smallest |correction|).
inline RoiAlignment align_rois(const BinaryMask& roi_l, const BinaryMask& roi_r,
                               int roi_delta = 10) {
    require(roi_l.count() > 0 && roi_r.count() > 0, "empty ROI");
    RoiAlignment a;
    a.base_shift = std::abs(detail::centroid_x(roi_r) - detail::centroid_x(roi_l));
    const int base = static_cast<int>(std::lround(a.base_shift));
    const auto runs_l = detail::row_runs(roi_l);
    const auto runs_r = detail::row_runs(roi_r);
    long long best = -1;
    for (int d = -roi_delta; d <= roi_delta; ++d) {
        const long long ov = detail::run_overlap(runs_l, runs_r, base + d);
        if (ov > best || (ov == best && std::abs(d) < std::abs(a.delta))) {
            best = ov;
            a.delta = d;
        }
    }
    a.total_shift = base + a.delta;
    return a;
}

// Block matching by composite labels: shift the left class mask, label both
// sides, encode each overlap pixel as left_label * 10^rho + right_label with
// rho = 1 + floor(log10(right label count)), vote, then greedily keep the
// heaviest pairs one-to-one.
inline std::vector<BlockMatch> match_blocks(const BinaryMask& c_left, const BinaryMask& c_right,
                                            const RoiAlignment& shift) {
    // Label before shifting so the labels stay identical to the ones the
    // extraction stage stamped on the dots of the unshifted left view.
    const LabeledImage left_labels = connected_components(c_left);
    LabeledImage ll(c_right.width, c_right.height);
    ll.count = left_labels.count;
    for (int y = 0; y < ll.height; ++y)
        for (int x = 0; x < ll.width; ++x) {
            const int sx = x + shift.total_shift;
            if (sx >= 0 && sx < left_labels.width && y < left_labels.height)
                ll.at(x, y) = left_labels.at(sx, y);
        }
    const LabeledImage lr = connected_components(c_right);
    if (lr.count == 0) return {};

    const int rho = 1 + static_cast<int>(std::floor(std::log10(static_cast<double>(lr.count))));
    long long scale = 1;
    for (int i = 0; i < rho; ++i) scale *= 10;

    std::unordered_map<long long, long long> votes;
    for (size_t i = 0; i < ll.labels.size(); ++i)
        if (ll.labels[i] && lr.labels[i])
            ++votes[static_cast<long long>(ll.labels[i]) * scale + lr.labels[i]];

    struct Entry {
        long long overlap;
        int left, right;
    };
    std::vector<Entry> entries;
    for (const auto& [composite, count] : votes)
        entries.push_back({count, static_cast<int>(composite / scale),
                           static_cast<int>(composite % scale)});
    std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
        if (a.overlap != b.overlap) return a.overlap > b.overlap;
        if (a.left != b.left) return a.left < b.left;
        return a.right < b.right;
    });

    std::vector<char> used_l(ll.count + 1, 0), used_r(lr.count + 1, 0);
    std::vector<BlockMatch> out;
    for (const Entry& e : entries) {
        if (used_l[e.left] || used_r[e.right]) continue;
        used_l[e.left] = used_r[e.right] = 1;
        out.push_back({e.left, e.right, e.overlap});
    }
    std::sort(out.begin(), out.end(),
              [](const BlockMatch& a, const BlockMatch& b) { return a.left_label < b.left_label; });
    return out;
}

struct DotBlockMatch {
    int delta_prime = 0;
    std::vector<std::pair<int, int>> pairs;  // indices into the input lists
};

// Intra-block matching. Left dots must already be shifted by total_shift; the
// residual shift delta' minimizes the all-pairs distance sum, then dots pair
// greedily by ascending distance under the spacing gate.
inline DotBlockMatch match_dots_in_block(const std::vector<Dot>& left_shifted,
                                         const std::vector<Dot>& right, int dot_delta = 5,
                                         double gate_factor = 0.5) {
    DotBlockMatch res;
    if (left_shifted.empty() || right.empty()) return res;

    double best_sum = 1e300;
    for (int d = -dot_delta; d <= dot_delta; ++d) {
        double sum = 0;
        for (const Dot& l : left_shifted)
            for (const Dot& r : right) sum += std::hypot(l.x + d - r.x, l.y - r.y);
        if (sum < best_sum - 1e-12 ||
            (std::abs(sum - best_sum) <= 1e-12 && std::abs(d) < std::abs(res.delta_prime))) {
            best_sum = sum;
            res.delta_prime = d;
        }
    }

    std::vector<double> rx, ry;
    for (const Dot& r : right) {
        rx.push_back(r.x);
        ry.push_back(r.y);
    }
    const double gate = gate_factor * detail::median_nn_spacing(rx, ry);

    std::vector<detail::Candidate> cands;
    for (size_t i = 0; i < left_shifted.size(); ++i)
        for (size_t j = 0; j < right.size(); ++j) {
            const double d = std::hypot(left_shifted[i].x + res.delta_prime - right[j].x,
                                        left_shifted[i].y - right[j].y);
            if (d <= gate)
                cands.push_back({d, static_cast<int>(i), static_cast<int>(j)});
        }
    res.pairs = detail::greedy_assign(std::move(cands), static_cast<int>(left_shifted.size()),
                                      static_cast<int>(right.size()));
    return res;
}

// Scattered-data field left -> right built from matched dot pairs
// (global indices into the two DotSets).
inline MappingField build_mapping(const DotSet& left, const DotSet& right,
                                  const std::vector<std::pair<int, int>>& pairs) {
    std::vector<std::pair<double, double>> sites;
    std::vector<double> vx, vy;
    for (auto [li, ri] : pairs) {
        sites.emplace_back(left.dots[li].x, left.dots[li].y);
        vx.push_back(right.dots[ri].x);
        vy.push_back(right.dots[ri].y);
    }
    return MappingField(sites, std::move(vx), std::move(vy));
}

// Match one color class through a mapping fit: each left dot's fitted position
// pairs with the nearest right dot, one-to-one, under a global spacing gate.
// Indices are global indices into the DotSets.
inline std::vector<std::pair<int, int>> match_by_fit(const MappingField& field,
                                                     const DotSet& left,
                                                     const std::vector<int>& left_idx,
                                                     const DotSet& right,
                                                     const std::vector<int>& right_idx,
                                                     double gate_factor = 0.5) {
    if (left_idx.empty() || right_idx.empty()) return {};
    std::vector<double> rx, ry;
    for (int i : right_idx) {
        rx.push_back(right.dots[i].x);
        ry.push_back(right.dots[i].y);
    }
    const double spacing = detail::median_nn_spacing(rx, ry);
    const double gate = spacing >= 1e300 ? 1e300 : gate_factor * spacing;
    const double cell = spacing >= 1e300 ? std::max(gate_factor, 1.0) : spacing;
    const detail::PointGrid grid(rx, ry, cell);

    std::vector<detail::Candidate> cands;
    std::vector<int> hits;
    for (size_t i = 0; i < left_idx.size(); ++i) {
        const Dot& l = left.dots[left_idx[i]];
        const auto e = field(l.x, l.y);
        double fx = e.x, fy = e.y;
        if (e.extrapolated) {
            // Outside the site hull the field returns the nearest site's
            // value; carry that site's displacement over to the query so the
            // fit stays usable in the border ring.
            fx += l.x - e.site_x;
            fy += l.y - e.site_y;
        }
        grid.query(fx, fy, gate, hits);
        for (int j : hits)
            cands.push_back({std::hypot(rx[j] - fx, ry[j] - fy), static_cast<int>(i), j});
    }
    auto local = detail::greedy_assign(std::move(cands), static_cast<int>(left_idx.size()),
                                       static_cast<int>(right_idx.size()));
    std::vector<std::pair<int, int>> out;
    for (auto [li, ri] : local) out.emplace_back(left_idx[li], right_idx[ri]);
    std::sort(out.begin(), out.end());
    return out;
}

struct IterativeMatchResult {
    CorrespondenceSet corr;
    int cycles = 0;       // refinement cycles that changed the pair set
    bool converged = false;
    size_t seed_pairs = 0;
};

namespace detail {

inline std::vector<std::pair<int, int>> seed_color(const DotSet& left, const DotSet& right,
                                                   DotColor color,
                                                   const std::vector<BlockMatch>& blocks,
                                                   const RoiAlignment& shift,
                                                   const MatchConfig& cfg) {
    std::map<int, std::vector<int>> by_left, by_right;
    for (size_t i = 0; i < left.dots.size(); ++i)
        if (left.dots[i].color == color) by_left[left.dots[i].block].push_back(static_cast<int>(i));
    for (size_t i = 0; i < right.dots.size(); ++i)
        if (right.dots[i].color == color)
            by_right[right.dots[i].block].push_back(static_cast<int>(i));

    std::vector<std::pair<int, int>> out;
    for (const BlockMatch& bm : blocks) {
        const auto il = by_left.find(bm.left_label);
        const auto ir = by_right.find(bm.right_label);
        if (il == by_left.end() || ir == by_right.end()) continue;
        std::vector<Dot> ld, rd;
        for (int i : il->second) {
            Dot d = left.dots[i];
            d.x -= shift.total_shift;
            ld.push_back(d);
        }
        for (int i : ir->second) rd.push_back(right.dots[i]);
        const DotBlockMatch m = match_dots_in_block(ld, rd, cfg.dot_delta, cfg.gate_factor);
        for (auto [a, b] : m.pairs) out.emplace_back(il->second[a], ir->second[b]);
    }
    std::sort(out.begin(), out.end());
    return out;
}

// Deterministic stride subsample keeping fit-field construction affordable.
inline std::vector<std::pair<int, int>> subsample_pairs(const std::vector<std::pair<int, int>>& in,
                                                        int max_sites) {
    if (static_cast<int>(in.size()) <= max_sites) return in;
    std::vector<std::pair<int, int>> out;
    const double step = static_cast<double>(in.size()) / max_sites;
    for (int k = 0; k < max_sites; ++k) out.push_back(in[static_cast<size_t>(k * step)]);
    return out;
}

}  // namespace detail

// Seed green/blue matches from the block matching, then cycle: fit red from
// green+blue, refit blue from red+green, refit green from red+blue, until the
// full pair set stops changing.
inline IterativeMatchResult iterative_match(const DotSet& left, const DotSet& right,
                                            const std::vector<BlockMatch>& green_blocks,
                                            const std::vector<BlockMatch>& blue_blocks,
                                            const RoiAlignment& shift,
                                            const MatchConfig& cfg = {}) {
    using Pairs = std::vector<std::pair<int, int>>;
    std::array<std::vector<int>, 3> left_idx, right_idx;  // per DotColor
    for (size_t i = 0; i < left.dots.size(); ++i)
        left_idx[static_cast<int>(left.dots[i].color)].push_back(static_cast<int>(i));
    for (size_t i = 0; i < right.dots.size(); ++i)
        right_idx[static_cast<int>(right.dots[i].color)].push_back(static_cast<int>(i));

    constexpr int R = static_cast<int>(DotColor::Red);
    constexpr int G = static_cast<int>(DotColor::Green);
    constexpr int B = static_cast<int>(DotColor::Blue);

    std::array<Pairs, 3> pairs;
    pairs[G] = detail::seed_color(left, right, DotColor::Green, green_blocks, shift, cfg);
    pairs[B] = detail::seed_color(left, right, DotColor::Blue, blue_blocks, shift, cfg);
    IterativeMatchResult res;
    res.seed_pairs = pairs[G].size() + pairs[B].size();
    require(res.seed_pairs >= 3, "insufficient seed matches");

    const auto refit = [&](const Pairs& a, const Pairs& b, int color) {
        Pairs sites = a;
        sites.insert(sites.end(), b.begin(), b.end());
        const MappingField field =
            build_mapping(left, right, detail::subsample_pairs(sites, cfg.max_field_sites));
        return match_by_fit(field, left, left_idx[color], right, right_idx[color],
                            cfg.gate_factor);
    };

    for (int cycle = 1; cycle <= cfg.max_iterations; ++cycle) {
        const Pairs red = refit(pairs[G], pairs[B], R);
        const Pairs blue = refit(red, pairs[G], B);
        const Pairs green = refit(red, blue, G);
        const bool unchanged = red == pairs[R] && blue == pairs[B] && green == pairs[G];
        pairs[R] = red;
        pairs[B] = blue;
        pairs[G] = green;
        if (unchanged) {
            res.converged = true;
            break;
        }
        res.cycles = cycle;
    }

    res.corr.left = left;
    res.corr.right = right;
    for (int c : {R, G, B})
        for (auto [li, ri] : pairs[c])
            res.corr.pairs.push_back({li, ri, static_cast<DotColor>(c)});
    std::sort(res.corr.pairs.begin(), res.corr.pairs.end(),
              [](const CorrespondencePair& a, const CorrespondencePair& b) {
                  return a.left < b.left;
              });
    return res;
}

}  // namespace dotstereo
