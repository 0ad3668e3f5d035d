// analysis.hpp - series comparison and shape measurements (widths, decay
// rates, dominant frequencies) shared by the CLI reports and the tests.

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace qwsq::analysis {

inline double sup_norm(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

/// Per-point deviation |x_i - ref_i| scaled by ||ref||_inf, so that zero
/// crossings of an oscillating reference do not blow up the measure.
struct Deviation {
    std::vector<double> pointwise;
    double max{0.0};
    double mean{0.0};
};

inline Deviation relative_deviation(const std::vector<double>& x, const std::vector<double>& ref) {
    if (x.size() != ref.size() || x.empty()) throw std::invalid_argument("deviation needs equal, non-empty series");
    const double scale = sup_norm(ref);
    Deviation d;
    d.pointwise.resize(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double diff = std::abs(x[i] - ref[i]);
        d.pointwise[i] = scale > 0.0 ? diff / scale : diff;
    }
    d.max = *std::max_element(d.pointwise.begin(), d.pointwise.end());
    d.mean = std::accumulate(d.pointwise.begin(), d.pointwise.end(), 0.0) / static_cast<double>(x.size());
    return d;
}

/// ||x - ref||_inf / ||ref||_inf
inline double sup_relative(const std::vector<double>& x, const std::vector<double>& ref) {
    return relative_deviation(x, ref).max;
}

inline bool strictly_decreasing(const std::vector<double>& v) {
    for (std::size_t i = 1; i < v.size(); ++i)
        if (!(v[i] < v[i - 1])) return false;
    return true;
}

inline bool strictly_increasing(const std::vector<double>& v) {
    for (std::size_t i = 1; i < v.size(); ++i)
        if (!(v[i] > v[i - 1])) return false;
    return true;
}

inline std::size_t argmax(const std::vector<double>& v) {
    return static_cast<std::size_t>(std::distance(v.begin(), std::max_element(v.begin(), v.end())));
}

inline std::size_t nearest_index(const std::vector<double>& grid, double x) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (std::abs(grid[i] - x) < std::abs(grid[best] - x)) best = i;
    return best;
}

/// Local maximum reached by hill-climbing from the sample nearest `center`.
inline std::size_t local_peak(const std::vector<double>& values, std::size_t i) {
    while (true) {
        if (i + 1 < values.size() && values[i + 1] > values[i]) ++i;
        else if (i > 0 && values[i - 1] > values[i]) --i;
        else return i;
    }
}

/// Full width at half maximum of the peak nearest `center`, with linear
/// interpolation of both half-height crossings. NaN if a crossing falls
/// outside the grid.
inline double peak_fwhm(const std::vector<double>& grid, const std::vector<double>& values, double center) {
    if (grid.size() != values.size() || grid.size() < 3) throw std::invalid_argument("peak_fwhm needs matching grids");
    const std::size_t peak = local_peak(values, nearest_index(grid, center));
    const double half = 0.5 * values[peak];
    const double nan = std::numeric_limits<double>::quiet_NaN();

    std::size_t r = peak;
    while (r + 1 < values.size() && values[r] > half) ++r;
    if (values[r] > half) return nan;
    std::size_t l = peak;
    while (l > 0 && values[l] > half) --l;
    if (values[l] > half) return nan;

    const auto cross = [&](std::size_t lo, std::size_t hi) {
        return grid[lo] + (half - values[lo]) / (values[hi] - values[lo]) * (grid[hi] - grid[lo]);
    };
    return cross(r - 1, r) - cross(l, l + 1);
}

/// Least-squares slope of log|y| through the local maxima of |y|, i.e. the
/// log-slope of an oscillating signal's envelope. Points with |y| below
/// `floor` are ignored.
inline double envelope_log_slope(const std::vector<double>& t, const std::vector<double>& y, double floor = 1e-300) {
    std::vector<double> xs, ys;
    for (std::size_t i = 1; i + 1 < y.size(); ++i) {
        const double m = std::abs(y[i]);
        if (m >= std::abs(y[i - 1]) && m >= std::abs(y[i + 1]) && m > floor) {
            xs.push_back(t[i]);
            ys.push_back(std::log(m));
        }
    }
    if (xs.size() < 2) throw std::runtime_error("too few envelope maxima for a slope fit");
    const double n = static_cast<double>(xs.size());
    const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
    const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxy += (xs[i] - mx) * (ys[i] - my);
        sxx += (xs[i] - mx) * (xs[i] - mx);
    }
    return sxy / sxx;
}

/// Angular frequency in (0, omega_max] with the largest discrete Fourier
/// amplitude of the mean-removed signal, scanned on `count` frequencies.
inline double dominant_frequency(const std::vector<double>& t, const std::vector<double>& y, double omega_max,
                                 std::size_t count = 4000) {
    if (t.size() != y.size() || t.size() < 2) throw std::invalid_argument("dominant_frequency needs matching series");
    const double mean = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(y.size());
    // On a uniform grid the phasor advances by a fixed rotation per sample.
    const double dt = (t.back() - t.front()) / static_cast<double>(t.size() - 1);
    bool uniform = true;
    for (std::size_t i = 1; i < t.size() && uniform; ++i)
        uniform = std::abs(t[i] - t[i - 1] - dt) <= 1e-9 * std::abs(dt);

    double best_w = 0.0, best_amp = -1.0;
    for (std::size_t k = 1; k <= count; ++k) {
        const double w = omega_max * static_cast<double>(k) / static_cast<double>(count);
        std::complex<double> acc{0.0, 0.0};
        if (uniform) {
            const std::complex<double> step = std::polar(1.0, -w * dt);
            std::complex<double> phase = std::polar(1.0, -w * t.front());
            for (std::size_t i = 0; i < t.size(); ++i, phase *= step) acc += (y[i] - mean) * phase;
        } else {
            for (std::size_t i = 0; i < t.size(); ++i) acc += (y[i] - mean) * std::polar(1.0, -w * t[i]);
        }
        const double amp = std::abs(acc);
        if (amp > best_amp) {
            best_amp = amp;
            best_w = w;
        }
    }
    return best_w;
}

}  // namespace qwsq::analysis
