// series.hpp - sampled observables and sampling grids.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "qwsq/model.hpp"

namespace qwsq {

enum class ObservableKind {
    intensity,
    spectrum,
    spectrum_normalized,
    g2,
    var_b1,
    var_b2,
    correlation_re,
    correlation_im,
};

enum class Layer { closed_form, oracle };

inline std::string_view to_string(ObservableKind k) {
    switch (k) {
        case ObservableKind::intensity: return "intensity";
        case ObservableKind::spectrum: return "spectrum";
        case ObservableKind::spectrum_normalized: return "spectrum_normalized";
        case ObservableKind::g2: return "g2";
        case ObservableKind::var_b1: return "var_b1";
        case ObservableKind::var_b2: return "var_b2";
        case ObservableKind::correlation_re: return "correlation_re";
        case ObservableKind::correlation_im: return "correlation_im";
    }
    return "unknown";
}

inline std::string_view to_string(Layer l) {
    return l == Layer::closed_form ? "closed_form" : "oracle";
}

/// One observable on a time or angular-frequency grid.
struct ObservableSeries {
    std::vector<double> grid;
    std::vector<double> values;
    ObservableKind kind{ObservableKind::intensity};
    SystemParams params{};
    Layer layer{Layer::closed_form};
    // max(kappa, gamma, 2 eps)/(4g) for closed-form strong-coupling results.
    double strong_coupling_q{0.0};

    std::size_t size() const noexcept { return grid.size(); }
};

/// `count` equally spaced samples on [lo, hi], endpoints included.
inline std::vector<double> linspace(double lo, double hi, std::size_t count) {
    if (count < 2) throw std::invalid_argument("linspace needs at least two points");
    if (!(lo < hi)) throw std::invalid_argument("linspace needs lo < hi");
    std::vector<double> out(count);
    const double step = (hi - lo) / static_cast<double>(count - 1);
    for (std::size_t i = 0; i < count; ++i) out[i] = lo + step * static_cast<double>(i);
    out.back() = hi;
    return out;
}

inline bool strictly_increasing(const std::vector<double>& grid) {
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (!(grid[i] > grid[i - 1])) return false;
    return true;
}

/// Kind-specific sanity checks. Returns an empty string when the series is
/// fine, otherwise a description of the first violation.
///
/// Normalized spectra are only checked for finiteness here: they are divided
/// by S(g), which is not exactly the maximum of the strong-coupling formula.
/// Use normalized_excursion() to inspect how far they leave [0, 1].
inline std::string check_series(const ObservableSeries& s, double tol = 1e-12) {
    if (s.grid.size() != s.values.size()) return "grid/value size mismatch";
    if (!strictly_increasing(s.grid)) return "grid not strictly increasing";
    for (std::size_t i = 0; i < s.values.size(); ++i) {
        const double v = s.values[i];
        if (!std::isfinite(v)) return "non-finite value at index " + std::to_string(i);
        const bool non_negative =
            s.kind == ObservableKind::intensity || s.kind == ObservableKind::g2;
        if (non_negative && v < -tol) return "negative value at index " + std::to_string(i);
    }
    return {};
}

struct Excursion {
    double below_zero{0.0};  // max(0, -min value)
    double above_one{0.0};   // max(0, max value - 1)
};

inline Excursion normalized_excursion(const ObservableSeries& s) {
    Excursion e;
    for (double v : s.values) {
        e.below_zero = std::max(e.below_zero, -v);
        e.above_one = std::max(e.above_one, v - 1.0);
    }
    return e;
}

}  // namespace qwsq
