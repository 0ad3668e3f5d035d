// app.hpp - command-line front end: run configuration, dataset assembly for
// every subcommand, and the argv entry point.
//
// Exit codes: 0 success, 2 invalid parameters or usage, 3 numerical
// failure, 4 validation verdict failure.

#pragma once

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <future>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "qwsq/analysis.hpp"
#include "qwsq/closed_form.hpp"
#include "qwsq/compare.hpp"
#include "qwsq/errors.hpp"
#include "qwsq/io.hpp"
#include "qwsq/model.hpp"
#include "qwsq/oracle.hpp"
#include "qwsq/series.hpp"

namespace qwsq::cli {

inline constexpr int exit_ok = 0;
inline constexpr int exit_invalid = 2;
inline constexpr int exit_numerical = 3;
inline constexpr int exit_verdict = 4;

enum class LayerChoice { closed, oracle, both };

struct RunConfig {
    std::string command;  // intensity | spectrum | g2 | squeezing | coefficients | figure | validate
    SystemParams params{};
    std::set<std::string> explicit_params;  // keys the user set ("kappa", "gamma", ...)

    LayerChoice layer{LayerChoice::closed};
    std::optional<double> tmin, tmax, wmin, wmax;
    std::size_t points{1001};
    bool normalized{false};
    bool scale_gamma{false};
    std::string format{"csv"};
    std::string output{"-"};

    closed_form::IntensityReading intensity_reading{closed_form::IntensityReading::printed};
    closed_form::QuadratureReading quadrature_reading{closed_form::QuadratureReading::corrected};

    std::string figure;               // 2 | 3 | 4 | g2 | qv
    std::vector<double> eps_list;     // figure override
    std::vector<double> g_sweep{5.0, 10.0, 20.0, 50.0};
};

struct RunResult {
    int exit_code{exit_ok};
    io::Dataset dataset;
    std::string message;  // diagnostics for stderr
};

namespace detail {

inline std::string num(double v) { return io::format_double(v); }

inline std::string join(const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + num(v[i]);
    return s;
}

inline const char* layer_name(LayerChoice l) {
    switch (l) {
        case LayerChoice::closed: return "closed";
        case LayerChoice::oracle: return "oracle";
        case LayerChoice::both: return "both";
    }
    return "?";
}

inline bool wants_closed(LayerChoice l) { return l != LayerChoice::oracle; }
inline bool wants_oracle(LayerChoice l) { return l != LayerChoice::closed; }

inline SystemParams scaled(const RunConfig& cfg) {
    SystemParams p = cfg.params;
    if (cfg.scale_gamma) {
        if (!(p.gamma > 0.0))
            throw ParameterError(ParameterError::Kind::NegativeRate, "--scale-gamma needs gamma > 0");
        p.kappa /= p.gamma;
        p.g /= p.gamma;
        p.epsilon /= p.gamma;
        p.gamma = 1.0;
    }
    return p;
}

inline void param_metadata(io::Dataset& ds, const SystemParams& p, const RunConfig& cfg) {
    ds.meta("kappa", num(p.kappa));
    ds.meta("gamma", num(p.gamma));
    ds.meta("g", num(p.g));
    ds.meta("epsilon", num(p.epsilon));
    ds.meta("n_e0", num(p.n_e0));
    ds.meta("units", cfg.scale_gamma ? "rates in units of gamma, times in units of 1/gamma" : "as given");
}

inline std::vector<double> time_grid(const RunConfig& cfg, double default_max) {
    const double lo = cfg.tmin.value_or(0.0);
    const double hi = cfg.tmax.value_or(default_max);
    if (lo < 0.0) throw std::invalid_argument("time grids must start at t >= 0 (got --tmin " + num(lo) + ")");
    if (cfg.points < 2) throw std::invalid_argument("--points must be at least 2");
    if (!(lo < hi)) throw std::invalid_argument("grid needs min < max");
    return linspace(lo, hi, cfg.points);
}

inline std::vector<double> frequency_grid(const RunConfig& cfg, double g) {
    const double span = g > 0.0 ? 3.0 * g : 10.0;
    const double lo = cfg.wmin.value_or(-span);
    const double hi = cfg.wmax.value_or(span);
    if (cfg.points < 2) throw std::invalid_argument("--points must be at least 2");
    if (!(lo < hi)) throw std::invalid_argument("grid needs min < max");
    return linspace(lo, hi, cfg.points);
}

inline io::Dataset header(const RunConfig& cfg, const SystemParams& p, const std::string& observable) {
    io::Dataset ds;
    ds.meta("tool", "qwsq");
    ds.meta("observable", observable);
    ds.meta("layer", layer_name(cfg.layer));
    param_metadata(ds, p, cfg);
    return ds;
}

inline io::Dataset run_observable(const RunConfig& cfg) {
    namespace cf = closed_form;
    const SystemParams raw = scaled(cfg);
    const ValidatedParams p = validate_params(raw);
    if (wants_closed(cfg.layer)) require_coupling(p);

    io::Dataset ds = header(cfg, raw, cfg.command);
    if (wants_closed(cfg.layer)) ds.meta("strong_coupling_q", num(strong_coupling_quality(p)));

    if (cfg.command == "intensity") {
        const auto t = time_grid(cfg, 10.0);
        ds.meta("intensity_reading", cf::to_string(cfg.intensity_reading));
        ds.meta("steady_state", num(cf::intensity_steady(p)));
        ds.add_column("t", t);
        if (wants_closed(cfg.layer)) {
            std::vector<double> v = cf::intensity_transient(p, t, cfg.intensity_reading).values;
            const auto low = std::min_element(v.begin(), v.end());
            if (*low < 0.0) {
                ds.meta("closed_negative_min", num(*low));
                ds.meta("closed_negative_at_t", num(t[static_cast<std::size_t>(low - v.begin())]));
            }
            ds.add_column("intensity_closed", std::move(v));
        }
        if (wants_oracle(cfg.layer)) ds.add_column("intensity_oracle", oracle::intensity_series(p, t).values);
    } else if (cfg.command == "spectrum") {
        const auto w = frequency_grid(cfg, p.g());
        ds.meta("normalized", cfg.normalized ? "true" : "false");
        ds.add_column("omega", w);
        if (wants_closed(cfg.layer)) {
            const cf::NegativityDiagnostic neg = cf::spectrum_negativity(p, w);
            if (neg.negative) {
                ds.meta("closed_negative_min", num(neg.min_value));
                ds.meta("closed_negative_at_omega", num(neg.at_omega));
            }
            ds.add_column("spectrum_closed", cf::spectrum_closed(p, w, cfg.normalized).values);
        }
        if (wants_oracle(cfg.layer)) {
            ds.meta("oracle_delay_horizon", num(oracle::spectrum_horizon(p)));
            ds.add_column("spectrum_oracle", oracle::spectrum_series(p, w, cfg.normalized).values);
        }
    } else if (cfg.command == "g2") {
        const auto tau = time_grid(cfg, 10.0);
        ds.add_column("tau", tau);
        if (wants_closed(cfg.layer)) ds.add_column("g2_closed", cf::g2_closed(p, tau).values);
        if (wants_oracle(cfg.layer)) ds.add_column("g2_oracle", oracle::g2_series(p, tau).values);
    } else if (cfg.command == "squeezing") {
        const auto t = time_grid(cfg, 10.0);
        ds.meta("quadrature_reading", cf::to_string(cfg.quadrature_reading));
        const cf::QuadraturePair ss = cf::quadrature_steady(p);
        ds.meta("steady_var_b1", num(ss.var_b1));
        ds.meta("steady_var_b2", num(ss.var_b2));
        ds.add_column("t", t);
        if (wants_closed(cfg.layer)) {
            cf::QuadratureSeries q = cf::quadrature_transient(p, t, cfg.quadrature_reading);
            ds.add_column("var_b1_closed", std::move(q.var_b1.values));
            ds.add_column("var_b2_closed", std::move(q.var_b2.values));
        }
        if (wants_oracle(cfg.layer)) {
            oracle::QuadratureSeries q = oracle::quadrature_series(p, t);
            ds.add_column("var_b1_oracle", std::move(q.var_b1.values));
            ds.add_column("var_b2_oracle", std::move(q.var_b2.values));
        }
    } else if (cfg.command == "coefficients") {
        if (cfg.layer != LayerChoice::closed)
            throw std::invalid_argument("coefficients exist only in the closed-form layer (use --layer closed)");
        const auto t = time_grid(cfg, 10.0);
        std::vector<std::vector<double>> cols(13);
        for (double ti : t) {
            const cf::CoefficientSet c = cf::coefficients(p, ti);
            const double row[13] = {ti, c.lambda1_plus, c.lambda1_minus, c.lambda2_plus, c.lambda2_minus,
                                    c.lambda3, c.lambda4, c.eta1_plus, c.eta1_minus, c.eta2_plus,
                                    c.eta2_minus, c.eta3_plus, c.eta3_minus};
            for (int k = 0; k < 13; ++k) cols[k].push_back(row[k]);
        }
        const char* names[13] = {"t", "lambda1_plus", "lambda1_minus", "lambda2_plus", "lambda2_minus",
                                 "lambda3", "lambda4", "eta1_plus", "eta1_minus", "eta2_plus",
                                 "eta2_minus", "eta3_plus", "eta3_minus"};
        for (int k = 0; k < 13; ++k) ds.add_column(names[k], std::move(cols[k]));
    } else {
        throw std::invalid_argument("unknown observable '" + cfg.command + "'");
    }
    return ds;
}

// ---------------------------------------------------------------------------

struct FigurePlan {
    std::string observable;  // intensity | spectrum_normalized | g2 | var_b2
    std::vector<double> default_eps;
    double default_tmax;
};

inline FigurePlan figure_plan(const std::string& n) {
    if (n == "2") return {"intensity", {0.1, 0.5, 0.9}, 10.0};
    if (n == "3") return {"intensity", {0.8, 0.9, 0.95}, 20.0};
    if (n == "4") return {"spectrum_normalized", {0.1, 0.5, 0.9}, 0.0};
    if (n == "g2") return {"g2", {0.1, 0.5, 0.9}, 10.0};
    if (n == "qv") return {"var_b2", {0.1, 0.5, 0.9}, 10.0};
    throw std::invalid_argument("unknown figure '" + n + "' (expected 2, 3, 4, g2 or qv)");
}

inline io::Dataset run_figure(const RunConfig& cfg) {
    namespace cf = closed_form;
    const FigurePlan plan = figure_plan(cfg.figure);

    // Fixed figure parameters unless overridden: kappa = gamma = 1, g = 5, n_e0 = 1.
    SystemParams base = cfg.params;
    if (!cfg.explicit_params.count("kappa")) base.kappa = 1.0;
    if (!cfg.explicit_params.count("gamma")) base.gamma = 1.0;
    if (!cfg.explicit_params.count("g")) base.g = 5.0;
    if (!cfg.explicit_params.count("ne")) base.n_e0 = 1.0;
    RunConfig local = cfg;
    local.params = base;
    base = scaled(local);

    const bool eps_override = !cfg.eps_list.empty();
    std::vector<double> eps = eps_override ? cfg.eps_list : plan.default_eps;
    if (cfg.explicit_params.count("epsilon") && !eps_override) eps = {cfg.params.epsilon};

    std::vector<ValidatedParams> params;
    for (double e : eps) {
        SystemParams p = base;
        p.epsilon = e;
        params.push_back(validate_params(p));
        if (wants_closed(cfg.layer)) require_coupling(params.back());
    }

    const bool is_spectrum = plan.observable == "spectrum_normalized";
    const std::vector<double> grid = is_spectrum ? frequency_grid(cfg, base.g) : time_grid(cfg, plan.default_tmax);

    io::Dataset ds;
    ds.meta("tool", "qwsq");
    ds.meta("figure", cfg.figure);
    ds.meta("observable", plan.observable);
    ds.meta("layer", layer_name(cfg.layer));
    param_metadata(ds, base, cfg);
    ds.meta("eps_set", join(eps));
    ds.meta("eps_set_source", eps_override || cfg.explicit_params.count("epsilon") ? "override" : "default");
    ds.add_column(is_spectrum ? "omega" : "t", grid);

    const auto closed_values = [&](const ValidatedParams& p) -> std::vector<double> {
        if (plan.observable == "intensity") return cf::intensity_transient(p, grid, cfg.intensity_reading).values;
        if (is_spectrum) return cf::spectrum_closed(p, grid, true).values;
        if (plan.observable == "g2") return cf::g2_closed(p, grid).values;
        return cf::quadrature_transient(p, grid, cfg.quadrature_reading).var_b2.values;
    };
    const auto oracle_values = [&](const ValidatedParams& p) -> std::vector<double> {
        if (plan.observable == "intensity") return oracle::intensity_series(p, grid).values;
        if (is_spectrum) return oracle::spectrum_series(p, grid, true).values;
        if (plan.observable == "g2") return oracle::g2_series(p, grid).values;
        return oracle::quadrature_series(p, grid).var_b2.values;
    };

    // Independent series in parallel; assembled in input order.
    std::vector<std::future<std::vector<double>>> closed_jobs, oracle_jobs;
    for (const ValidatedParams& p : params) {
        if (wants_closed(cfg.layer)) closed_jobs.push_back(std::async(std::launch::async, closed_values, p));
        if (wants_oracle(cfg.layer)) oracle_jobs.push_back(std::async(std::launch::async, oracle_values, p));
    }
    for (std::size_t i = 0; i < params.size(); ++i) {
        const std::string label = "eps=" + num(eps[i]);
        if (wants_closed(cfg.layer)) ds.add_column(label + "_closed", closed_jobs[i].get());
        if (wants_oracle(cfg.layer)) ds.add_column(label + "_oracle", oracle_jobs[i].get());
    }
    return ds;
}

// ---------------------------------------------------------------------------

struct ValidateResult {
    io::Dataset dataset;
    bool pass{false};
    std::string summary;
};

inline ValidateResult run_validate(const RunConfig& cfg) {
    const SystemParams base = scaled(cfg);
    for (double g : cfg.g_sweep) {
        if (!(g > 0.0))
            throw ParameterError(ParameterError::Kind::ZeroCoupling,
                                 "g=" + num(g) +
                                     " rejected for the closed-form layer: it assumes strong coupling "
                                     "(g >> kappa, gamma)");
    }
    if (cfg.g_sweep.size() < 2) throw std::invalid_argument("--g-sweep needs at least two couplings");
    const double horizon = cfg.tmax.value_or(10.0);
    if (!(horizon > 0.0)) throw std::invalid_argument("validation horizon must be positive");

    const std::vector<ComparisonSet> sweep = sweep_coupling(base, cfg.g_sweep, horizon);
    const std::vector<ConvergenceVerdict> verdicts = convergence_verdicts(sweep);

    ValidateResult res;
    io::Dataset& ds = res.dataset;
    ds.meta("tool", "qwsq");
    ds.meta("observable", "validate");
    param_metadata(ds, base, cfg);
    ds.meta("g_sweep", join(cfg.g_sweep));
    ds.meta("horizon", num(horizon));
    ds.meta("deviation", "max_t |closed - oracle| / max_t |oracle|");

    std::ostringstream summary;
    res.pass = true;
    for (const ConvergenceVerdict& v : verdicts) {
        const std::string key = v.observable + "[" + v.reading + "]";
        const std::string role = v.default_reading ? "default" : "alternative";
        ds.meta("verdict." + key, std::string(v.monotone ? "monotone" : "not_monotone") + " (" + role + ")");
        if (v.default_reading && !v.monotone) res.pass = false;
        summary << (v.monotone ? "  ok   " : "  FAIL ") << key << " (" << role << "):";
        for (double d : v.max_deviation) summary << ' ' << num(d);
        summary << '\n';
    }
    ds.meta("overall", res.pass ? "pass" : "fail");

    std::vector<double> gs, qs, g2c, g2o, g2gap, nc, no, freq;
    for (const ComparisonSet& s : sweep) {
        gs.push_back(s.params.g);
        qs.push_back(s.strong_coupling_q);
        g2c.push_back(s.g2_zero_closed);
        g2o.push_back(s.g2_zero_oracle);
        g2gap.push_back(std::abs(s.g2_zero_closed - s.g2_zero_oracle));
        nc.push_back(s.steady_intensity_closed);
        no.push_back(s.steady_intensity_oracle);
        freq.push_back(s.intensity_frequency_over_g);
    }
    ds.add_column("g", gs);
    ds.add_column("q", qs);
    for (const ConvergenceVerdict& v : verdicts) {
        const std::string key = v.observable + "[" + v.reading + "]";
        std::vector<double> mean;
        for (const ComparisonSet& s : sweep) mean.push_back(s.find(v.observable, v.reading)->deviation.mean);
        ds.add_column(key + "_max", v.max_deviation);
        ds.add_column(key + "_mean", mean);
    }
    ds.add_column("g2_zero_closed", g2c);
    ds.add_column("g2_zero_oracle", g2o);
    ds.add_column("g2_zero_gap", g2gap);
    ds.add_column("steady_intensity_closed", nc);
    ds.add_column("steady_intensity_oracle", no);
    ds.add_column("intensity_dominant_frequency_over_g", freq);

    for (const ComparisonSet& s : sweep)
        summary << "  g=" << num(s.params.g) << ": g2(0) closed " << num(s.g2_zero_closed) << " oracle "
                << num(s.g2_zero_oracle) << ", intensity oscillates at " << num(s.intensity_frequency_over_g)
                << " g\n";
    res.summary = "validation " + std::string(res.pass ? "passed" : "FAILED") + "\n" + summary.str();
    return res;
}

}  // namespace detail

/// Executes one configuration. Never throws for expected failures; they are
/// mapped onto the exit codes above with a message.
inline RunResult run(const RunConfig& cfg) {
    RunResult r;
    try {
        if (cfg.format != "csv" && cfg.format != "json")
            throw std::invalid_argument("--format must be csv or json");
        if (cfg.command == "figure") {
            r.dataset = detail::run_figure(cfg);
        } else if (cfg.command == "validate") {
            detail::ValidateResult v = detail::run_validate(cfg);
            r.dataset = std::move(v.dataset);
            r.message = std::move(v.summary);
            r.exit_code = v.pass ? exit_ok : exit_verdict;
        } else {
            r.dataset = detail::run_observable(cfg);
        }
    } catch (const ParameterError& e) {
        r.exit_code = exit_invalid;
        r.message = std::string("invalid parameters: ") + e.what() + "\n";
    } catch (const NumericalError& e) {
        r.exit_code = exit_numerical;
        r.message = std::string("numerical failure: ") + e.what() + "\n";
    } catch (const std::invalid_argument& e) {
        r.exit_code = exit_invalid;
        r.message = std::string("invalid configuration: ") + e.what() + "\n";
    }
    return r;
}

inline std::string encode(const RunConfig& cfg, const io::Dataset& ds) {
    return cfg.format == "json" ? io::to_json(ds) : io::to_csv(ds);
}

/// argv entry point.
inline int main_entry(int argc, const char* const* argv) {
    CLI::App app{"Quantum well in a subthreshold OPO cavity: closed-form observables and exact moment oracle"};
    app.set_config("--config", "", "flat key=value file mirroring the long flags; flags override it");
    app.require_subcommand(1, 1);
    app.fallthrough();

    RunConfig cfg;
    std::string layer = "closed", intensity_reading = "printed", quadrature_reading = "corrected";
    app.add_option("--kappa", cfg.params.kappa, "cavity decay rate")->capture_default_str();
    app.add_option("--gamma", cfg.params.gamma, "exciton spontaneous-emission rate")->capture_default_str();
    app.add_option("--g", cfg.params.g, "exciton-cavity coupling")->capture_default_str();
    app.add_option("--epsilon", cfg.params.epsilon, "pump amplitude")->capture_default_str();
    app.add_option("--ne", cfg.params.n_e0, "initial mean exciton number")->capture_default_str();
    app.add_option("--tmin", cfg.tmin, "time / delay grid start");
    app.add_option("--tmax", cfg.tmax, "time / delay grid end (validate: horizon)");
    app.add_option("--wmin", cfg.wmin, "frequency grid start (default -3g)");
    app.add_option("--wmax", cfg.wmax, "frequency grid end (default 3g)");
    app.add_option("--points", cfg.points, "grid points")->capture_default_str();
    app.add_option("--layer", layer, "closed | oracle | both")
        ->check(CLI::IsMember({"closed", "oracle", "both"}))
        ->capture_default_str();
    app.add_option("--format", cfg.format, "csv | json")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
    app.add_option("--output", cfg.output, "output path, - for stdout")->capture_default_str();
    app.add_flag("--normalized", cfg.normalized, "spectrum divided by S(g)");
    app.add_flag("--scale-gamma", cfg.scale_gamma, "express all rates in units of gamma");
    app.add_option("--intensity-reading", intensity_reading, "printed | sin_gt_bracket | sin_2gt_bracket")
        ->check(CLI::IsMember({"printed", "sin_gt_bracket", "sin_2gt_bracket"}))
        ->capture_default_str();
    app.add_option("--quadrature-reading", quadrature_reading, "corrected | printed")
        ->check(CLI::IsMember({"corrected", "printed"}))
        ->capture_default_str();
    app.add_option("--eps-list", cfg.eps_list, "figure: comma-separated pump amplitudes")->delimiter(',');
    app.add_option("--g-sweep", cfg.g_sweep, "validate: comma-separated couplings")->delimiter(',')->capture_default_str();

    for (const char* name : {"intensity", "spectrum", "g2", "squeezing", "coefficients"})
        app.add_subcommand(name, std::string("emit the ") + name + " dataset");
    CLI::App* figure = app.add_subcommand("figure", "reproduce a figure dataset (one series per pump amplitude)");
    figure->add_option("n", cfg.figure, "2 | 3 | 4 | g2 | qv")->required()->check(CLI::IsMember({"2", "3", "4", "g2", "qv"}));
    app.add_subcommand("validate", "closed form vs oracle over a coupling sweep");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return exit_invalid;
    }

    cfg.command = app.get_subcommands().front()->get_name();
    cfg.layer = layer == "oracle" ? LayerChoice::oracle : layer == "both" ? LayerChoice::both : LayerChoice::closed;
    cfg.intensity_reading = intensity_reading == "sin_gt_bracket"    ? closed_form::IntensityReading::sin_gt_bracket
                            : intensity_reading == "sin_2gt_bracket" ? closed_form::IntensityReading::sin_2gt_bracket
                                                                     : closed_form::IntensityReading::printed;
    cfg.quadrature_reading =
        quadrature_reading == "printed" ? closed_form::QuadratureReading::printed : closed_form::QuadratureReading::corrected;
    for (const char* key : {"kappa", "gamma", "g", "epsilon", "ne"})
        if (app.get_option(std::string("--") + key)->count() > 0) cfg.explicit_params.insert(key);

    RunResult r = run(cfg);
    if (!r.message.empty()) std::cerr << r.message;
    if (r.exit_code == exit_ok || r.exit_code == exit_verdict) {
        try {
            io::write_atomic(cfg.output, encode(cfg, r.dataset));
        } catch (const std::exception& e) {
            std::cerr << "output failure: " << e.what() << "\n";
            return exit_numerical;
        }
    }
    return r.exit_code;
}

}  // namespace qwsq::cli
