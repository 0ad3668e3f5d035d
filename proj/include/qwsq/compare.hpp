// compare.hpp - closed-form vs oracle comparison reports and g-sweeps.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <future>
#include <string>
#include <vector>

#include "qwsq/analysis.hpp"
#include "qwsq/closed_form.hpp"
#include "qwsq/model.hpp"
#include "qwsq/oracle.hpp"
#include "qwsq/series.hpp"

namespace qwsq {

struct ComparisonReport {
    std::string observable;
    std::string reading;     // interpretation used by the closed form ("-" if none)
    bool default_reading{true};
    std::vector<double> grid;
    analysis::Deviation deviation;
    double strong_coupling_q{0.0};
};

/// All comparisons for one parameter set.
struct ComparisonSet {
    SystemParams params;
    double strong_coupling_q{0.0};
    std::vector<ComparisonReport> reports;

    double g2_zero_closed{0.0};
    double g2_zero_oracle{0.0};
    double steady_intensity_closed{0.0};
    double steady_intensity_oracle{0.0};
    // Dominant angular frequency of the oracle intensity divided by g.
    double intensity_frequency_over_g{0.0};

    const ComparisonReport* find(const std::string& observable, const std::string& reading) const {
        for (const auto& r : reports)
            if (r.observable == observable && r.reading == reading) return &r;
        return nullptr;
    }
};

namespace detail {

inline std::size_t samples_for(double span, double g) {
    const double per_unit = std::max(100.0, 40.0 * g);
    return static_cast<std::size_t>(std::ceil(span * per_unit)) + 1;
}

inline ComparisonReport make_report(std::string observable, std::string reading, bool is_default,
                                    const std::vector<double>& grid, const std::vector<double>& closed,
                                    const std::vector<double>& oracle, double q) {
    ComparisonReport r;
    r.observable = std::move(observable);
    r.reading = std::move(reading);
    r.default_reading = is_default;
    r.grid = grid;
    r.deviation = analysis::relative_deviation(closed, oracle);
    r.strong_coupling_q = q;
    return r;
}

}  // namespace detail

/// Runs both layers for intensity, correlation, spectrum (around the +g
/// peak), g2 and both quadratures over [0, horizon]. Every interpretation of
/// an ambiguous closed form is reported; `default_reading` marks the one the
/// library uses.
inline ComparisonSet compare_layers(const ValidatedParams& p, double horizon) {
    namespace cf = closed_form;
    require_coupling(p);
    const double q = strong_coupling_quality(p);
    ComparisonSet set;
    set.params = p.raw();
    set.strong_coupling_q = q;

    const std::vector<double> t = linspace(0.0, horizon, detail::samples_for(horizon, p.g()));

    // Intensity.
    const ObservableSeries nb = oracle::intensity_series(p, t);
    for (cf::IntensityReading rd : cf::all_intensity_readings) {
        const ObservableSeries c = cf::intensity_transient(p, t, rd);
        set.reports.push_back(detail::make_report("intensity", cf::to_string(rd),
                                                  rd == cf::IntensityReading::printed, t, c.values, nb.values, q));
    }
    set.intensity_frequency_over_g = analysis::dominant_frequency(t, nb.values, 4.0 * p.g()) / p.g();

    // Quadratures.
    const oracle::QuadratureSeries qv = oracle::quadrature_series(p, t);
    for (cf::QuadratureReading rd : {cf::QuadratureReading::corrected, cf::QuadratureReading::printed}) {
        const cf::QuadratureSeries c = cf::quadrature_transient(p, t, rd);
        const bool is_default = rd == cf::QuadratureReading::corrected;
        set.reports.push_back(
            detail::make_report("var_b1", cf::to_string(rd), is_default, t, c.var_b1.values, qv.var_b1.values, q));
        set.reports.push_back(
            detail::make_report("var_b2", cf::to_string(rd), is_default, t, c.var_b2.values, qv.var_b2.values, q));
    }

    const oracle::Generators gen = oracle::build_generators(p);
    const oracle::MomentState ss = oracle::steady_moments(gen);
    set.steady_intensity_closed = cf::intensity_steady(p);
    set.steady_intensity_oracle = ss.exciton_number();

    if (p.epsilon() > 0.0) {
        // Stationary correlation, normalised.
        const std::vector<cplx> corr = oracle::normalized_correlation(p, t);
        std::vector<double> corr_re(corr.size());
        std::transform(corr.begin(), corr.end(), corr_re.begin(), [](cplx z) { return z.real(); });
        set.reports.push_back(detail::make_report("correlation", "cos_g_tau", true, t,
                                                  cf::correlation_steady(p, t).real.values, corr_re, q));

        // g2.
        const ObservableSeries g2o = oracle::g2_numeric(gen, ss, t);
        set.reports.push_back(detail::make_report("g2", "-", true, t, cf::g2_closed(p, t).values, g2o.values, q));
        set.g2_zero_closed = cf::g2_zero_delay(p);
        set.g2_zero_oracle = g2o.values.front();

        // Spectrum around the +g peak.
        const double half_width = 4.0 * eigen_structure(p).gamma_plus;
        const std::vector<double> w = linspace(p.g() - half_width, p.g() + half_width, 201);
        const ObservableSeries so = oracle::spectrum_series(p, w, false);
        set.reports.push_back(
            detail::make_report("spectrum_peak", "-", true, w, cf::spectrum_closed(p, w, false).values, so.values, q));
    }
    return set;
}

/// One comparison set per coupling, evaluated concurrently and returned in
/// the order of `couplings`.
inline std::vector<ComparisonSet> sweep_coupling(const SystemParams& base, const std::vector<double>& couplings,
                                                 double horizon) {
    std::vector<ValidatedParams> params;
    params.reserve(couplings.size());
    for (double g : couplings) {
        SystemParams p = base;
        p.g = g;
        params.push_back(validate_params(p));
        require_coupling(params.back());
    }
    std::vector<std::future<ComparisonSet>> jobs;
    jobs.reserve(params.size());
    for (const ValidatedParams& p : params)
        jobs.push_back(std::async(std::launch::async, [p, horizon] { return compare_layers(p, horizon); }));
    std::vector<ComparisonSet> out;
    out.reserve(jobs.size());
    for (auto& j : jobs) out.push_back(j.get());
    return out;
}

struct ConvergenceVerdict {
    std::string observable;
    std::string reading;
    bool default_reading{true};
    std::vector<double> max_deviation;  // one per swept g
    bool monotone{false};
};

/// Monotone decrease of the max deviation along the sweep, per
/// (observable, reading).
inline std::vector<ConvergenceVerdict> convergence_verdicts(const std::vector<ComparisonSet>& sweep) {
    std::vector<ConvergenceVerdict> out;
    if (sweep.empty()) return out;
    for (const ComparisonReport& r : sweep.front().reports) {
        ConvergenceVerdict v;
        v.observable = r.observable;
        v.reading = r.reading;
        v.default_reading = r.default_reading;
        for (const ComparisonSet& s : sweep) {
            const ComparisonReport* m = s.find(r.observable, r.reading);
            v.max_deviation.push_back(m ? m->deviation.max : std::nan(""));
        }
        v.monotone = analysis::strictly_decreasing(v.max_deviation);
        out.push_back(std::move(v));
    }
    return out;
}

}  // namespace qwsq
