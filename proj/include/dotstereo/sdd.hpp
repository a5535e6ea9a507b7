// Histogram cluster analysis via the slope difference distribution:
// low-pass smooth the histogram, fit line slopes on both sides of every bin,
// and read cluster centers / partition thresholds off the extrema of the
// slope difference s(x).
#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <vector>

#include "dotstereo/filters.hpp"
#include "dotstereo/image.hpp"

namespace dotstereo {

struct SddParams {
    int bandwidth_w = 3;  // retained DFT harmonics
    int fit_n = 20;       // side window length of the slope fits, in bins

    void validate() const {
        require(bandwidth_w >= 1 && bandwidth_w <= 128, "sdd: bandwidth_w out of [1,128]");
        require(fit_n >= 2 && fit_n <= 64, "sdd: fit_n out of [2,64]");
    }
};

struct SddResult {
    std::array<double, 256> smoothed{};
    std::array<double, 256> slope_diff{};
    std::vector<int> valleys;        // partition thresholds
    std::vector<int> peaks_of_hist;  // cluster centers
};

namespace detail {

// Truncated Fourier reconstruction: keep harmonics 0..W of the 256-point DFT.
inline std::array<double, 256> dft_lowpass(const std::array<uint64_t, 256>& bins, int w) {
    std::array<double, 256> out{};
    constexpr double tau = 2.0 * std::numbers::pi;
    for (int k = 0; k <= w && k < 128; ++k) {
        double a = 0, b = 0;
        for (int x = 0; x < 256; ++x) {
            const double ph = tau * k * x / 256.0;
            a += bins[x] * std::cos(ph);
            b += bins[x] * std::sin(ph);
        }
        const double scale = (k == 0) ? 1.0 / 256.0 : 2.0 / 256.0;
        for (int x = 0; x < 256; ++x) {
            const double ph = tau * k * x / 256.0;
            out[x] += scale * (a * std::cos(ph) + b * std::sin(ph));
        }
    }
    return out;
}

}  // namespace detail

// Least-squares slope of y over x = 0..n (n+1 samples).
inline double fit_slope(const double* y, int n) {
    const double xm = n / 2.0;
    double num = 0, den = 0;
    for (int i = 0; i <= n; ++i) {
        num += (i - xm) * y[i];
        den += (i - xm) * (i - xm);
    }
    return num / den;
}

inline SddResult sdd_analyze(const Histogram& hist, const SddParams& params) {
    params.validate();
    require(hist.total > 0, "sdd: empty histogram");
    const int n = params.fit_n;

    SddResult res;
    res.smoothed = detail::dft_lowpass(hist.bins, params.bandwidth_w);

    // Degenerate histogram: all mass in a single bin.
    int nonzero = -1;
    bool single = true;
    for (int x = 0; x < 256; ++x)
        if (hist.bins[x]) {
            if (nonzero >= 0) single = false;
            nonzero = x;
        }
    if (single) {
        res.peaks_of_hist.push_back(std::clamp(nonzero, n, 255 - n));
        return res;
    }

    for (int x = n; x <= 255 - n; ++x) {
        const double a_left = fit_slope(&res.smoothed[x - n], n);
        const double a_right = fit_slope(&res.smoothed[x], n);
        res.slope_diff[x] = a_right - a_left;
    }

    const auto& s = res.slope_diff;
    std::vector<int> raw_valleys, peaks;
    for (int x = n + 1; x < 255 - n; ++x) {
        if (s[x] > s[x - 1] && s[x] >= s[x + 1] && s[x] > 0) raw_valleys.push_back(x);
        if (s[x] < s[x - 1] && s[x] <= s[x + 1] && s[x] < 0) peaks.push_back(x);
    }

    // Clusters centered outside the analyzable range (mass piled near 0 or
    // 255) leave no in-range minimum of s; stand in a boundary peak so the
    // adjacent partition threshold is still recoverable.
    const auto mass = [&](int lo, int hi) {
        uint64_t m = 0;
        for (int x = lo; x < hi; ++x) m += hist.bins[x];
        return m;
    };
    if (mass(0, n) * 100 >= hist.total && (peaks.empty() || peaks.front() > 2 * n))
        peaks.insert(peaks.begin(), n);
    if (mass(256 - n, 256) * 100 >= hist.total && (peaks.empty() || peaks.back() < 255 - 2 * n))
        peaks.push_back(255 - n);

    // Keep one valley per inter-peak gap: the strongest s maximum strictly
    // between adjacent cluster centers. Ripple extrema elsewhere are noise.
    for (size_t i = 0; i + 1 < peaks.size(); ++i) {
        int best = -1;
        for (int v : raw_valleys)
            if (v > peaks[i] && v < peaks[i + 1] && (best < 0 || s[v] > s[best])) best = v;
        if (best >= 0) res.valleys.push_back(best);
    }
    res.peaks_of_hist = std::move(peaks);
    return res;
}

// Threshold rule for the saturation channel: the valley with the largest
// slope-difference magnitude separates the unlit background from the dots.
inline int select_strongest_valley(const SddResult& res) {
    require(!res.valleys.empty(), "no valley found");
    int best = res.valleys.front();
    for (int v : res.valleys)
        if (res.slope_diff[v] > res.slope_diff[best]) best = v;
    return best;
}

}  // namespace dotstereo
