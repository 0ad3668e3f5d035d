// Acceptance suite: one line per criterion, nonzero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "qwsq/analysis.hpp"
#include "qwsq/app.hpp"
#include "qwsq/closed_form.hpp"
#include "qwsq/compare.hpp"
#include "qwsq/oracle.hpp"
#include "support/reference.hpp"

using namespace qwsq;
namespace cf = qwsq::closed_form;
namespace orc = qwsq::oracle;

namespace {

struct Outcome {
    bool pass{false};
    std::string detail;
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

std::string list(const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += fmt(i ? " %.3e" : "%.3e", v[i]);
    return s;
}

const std::vector<double> couplings = {5.0, 10.0, 20.0, 50.0};

// 1 -------------------------------------------------------------------------
Outcome initial_condition() {
    double worst = 0.0;
    for (const ValidatedParams& p : test::random_params(100, 2024, 0.5, 100.0)) {
        const double v = cf::intensity_transient(p, {0.0, 1.0}).values.front();
        worst = std::max(worst, std::abs(v - p.n_e0()) / p.n_e0());
    }
    return {worst <= 1e-12, fmt("max relative error %.2e over 100 parameter sets (limit 1e-12)", worst)};
}

// 2 -------------------------------------------------------------------------
Outcome steady_intensity() {
    std::vector<double> gaps;
    for (double g : couplings) {
        const ValidatedParams p = test::params(1.0, 1.0, g, 0.5);
        const double exact = orc::steady_moments(orc::build_generators(p)).exciton_number();
        gaps.push_back(std::abs(exact - cf::intensity_steady(p)) / cf::intensity_steady(p));
    }
    const bool ok = gaps.back() < 0.02 && analysis::strictly_decreasing(gaps);
    return {ok, "relative gap at g = 5,10,20,50: " + list(gaps) + " (need < 2% at 50, decreasing)"};
}

// 3 -------------------------------------------------------------------------
Outcome single_mode_limit() {
    const ValidatedParams p = test::params(1.0, 1.0, 0.0, 0.4);
    const double n = orc::steady_moments(orc::build_generators(p)).photon_number();
    const double expected = 0.32 / 0.36;
    return {std::abs(n - expected) <= 1e-10, fmt("<a^dag a> = %.15f, expected %.15f", n, expected)};
}

// 4 -------------------------------------------------------------------------
Outcome bunching() {
    const double closed = cf::g2_zero_delay(test::params(1.0, 1.0, 5.0, 0.5));
    std::vector<double> oracle, gaps;
    for (double g : couplings) {
        const ValidatedParams p = test::params(1.0, 1.0, g, 0.5);
        oracle.push_back(orc::g2_series(p, {0.0, 1.0}).values.front());
        gaps.push_back(std::abs(oracle.back() - closed) / closed);
    }
    const bool ok = std::abs(closed - 6.0) <= 1e-12 && gaps.back() < 0.05 && analysis::strictly_decreasing(gaps);
    return {ok, fmt("closed g2(0) = %.6f; oracle at g=50 %.6f; relative gaps ", closed, oracle.back()) + list(gaps)};
}

// 5 -------------------------------------------------------------------------
Outcome squeezing_ceiling() {
    const double v = cf::quadrature_steady(test::params(1.0, 1.0, 5.0, 0.499 * 2.0)).var_b2;
    bool monotone = true, above = true;
    double prev = 2.0, last = 0.0;
    for (int k = 1; k <= 12; ++k) {
        const double eps = (1.0 - std::pow(10.0, -k)) * 1.0;  // approaching (kappa + gamma)/2 = 1
        last = cf::quadrature_steady(test::params(1.0, 1.0, 5.0, eps)).var_b2;
        monotone = monotone && last < prev;
        above = above && last > 0.5;
        prev = last;
    }
    const bool ok = std::abs(v - 0.5005) <= 1e-3 && std::abs(last - 0.5) <= 1e-6 && monotone && above;
    return {ok, fmt("var_b2 at eps = 0.499(kappa+gamma): %.6f; at 1 - 1e-12 of threshold: %.12f", v, last)};
}

// 6 -------------------------------------------------------------------------
Outcome spectrum_structure() {
    const ValidatedParams p = test::params(1.0, 1.0, 5.0, 0.5);
    double odd = 0.0;
    for (double w : linspace(0.0, 15.0, 3001)) {
        const double s = cf::spectrum_at(p, w);
        odd = std::max(odd, std::abs(s - cf::spectrum_at(p, -w)) / std::abs(s));
    }
    const std::vector<double> w = linspace(-15.0, 15.0, 601);
    const double norm_at_g = cf::spectrum_closed(p, w, true).values[analysis::nearest_index(w, 5.0)];

    const ObservableSeries num = orc::spectrum_series(p, w, false);
    const double cell = w[1] - w[0];
    const double up = w[analysis::local_peak(num.values, analysis::nearest_index(w, 5.0))];
    const double down = w[analysis::local_peak(num.values, analysis::nearest_index(w, -5.0))];

    const std::vector<double> wf = linspace(0.0, 10.0, 2001);
    std::vector<double> wc, wo;
    for (double eps : {0.1, 0.5, 0.9}) {
        const ValidatedParams q = test::params(1.0, 1.0, 5.0, eps);
        wc.push_back(analysis::peak_fwhm(wf, cf::spectrum_closed(q, wf, true).values, 5.0));
        wo.push_back(analysis::peak_fwhm(wf, orc::spectrum_series(q, wf, true).values, 5.0));
    }
    const bool ok = odd <= 1e-12 && norm_at_g == 1.0 && std::abs(up - 5.0) <= cell && std::abs(down + 5.0) <= cell &&
                    analysis::strictly_decreasing(wc) && analysis::strictly_decreasing(wo);
    return {ok, fmt("evenness %.1e; S_N(g) = %.17g; oracle peaks at %+.3f/%+.3f (cell %.3f); FWHM closed ", odd,
                    norm_at_g, up, down, cell) +
                    list(wc) + ", oracle " + list(wo)};
}

// 7 -------------------------------------------------------------------------
Outcome commutator_conservation() {
    const ValidatedParams p = test::params(1.0, 1.0, 50.0, 0.5, 1.0);
    const orc::Generators gen = orc::build_generators(p);
    const double h = orc::step_ceiling(gen);
    const auto steps = static_cast<std::size_t>(std::llround(10.0 / h));
    const std::vector<double> grid = linspace(0.0, 10.0, steps + 1);  // every integrator step
    const std::vector<orc::MomentState> traj = orc::propagate_moments(gen, orc::initial_moments(p), grid);
    double defect = 0.0, product = INFINITY;
    for (const orc::MomentState& m : traj) {
        defect = std::max(defect, orc::commutator_defect(m));
        const double nb = m.exciton_number(), re = m.exciton_squared().real();
        product = std::min(product, (1.0 + 2.0 * nb + 2.0 * re) * (1.0 + 2.0 * nb - 2.0 * re));
    }
    return {defect <= 1e-9 && product >= 1.0,
            fmt("%zu steps: max commutator defect %.2e, min var_b1*var_b2 %.12f", steps, defect, product)};
}

// 8 -------------------------------------------------------------------------
Outcome integrator_order() {
    const ValidatedParams p = test::params(1.0, 1.0, 5.0, 0.5, 1.0);
    const orc::Generators gen = orc::build_generators(p);
    const double h = orc::step_ceiling(gen);
    const std::vector<double> grid = linspace(0.0, 10.0, 101);
    auto run = [&](double step) {
        orc::PropagationOptions o;
        o.step = step;
        return orc::propagate_moments(gen, orc::initial_moments(p), grid, o);
    };
    const auto coarse = run(h), half = run(h / 2.0), ref = run(h / 4.0);
    double e1 = 0.0, e2 = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        e1 = std::max(e1, (coarse[i].S - ref[i].S).cwiseAbs().maxCoeff());
        e2 = std::max(e2, (half[i].S - ref[i].S).cwiseAbs().maxCoeff());
    }
    const double ratio = e1 / e2;
    return {ratio >= 12.0 && ratio <= 20.0, fmt("errors %.3e (h) and %.3e (h/2), ratio %.2f", e1, e2, ratio)};
}

// 9 -------------------------------------------------------------------------
Outcome transient_intensity() {
    std::vector<std::vector<double>> dev(std::size(cf::all_intensity_readings));
    for (double g : couplings) {
        const ValidatedParams p = test::params(1.0, 1.0, g, 0.5, 1.0);
        const std::vector<double> t = linspace(0.0, 10.0, detail::samples_for(10.0, g));
        const std::vector<double> exact = orc::intensity_series(p, t).values;
        for (std::size_t r = 0; r < dev.size(); ++r)
            dev[r].push_back(analysis::sup_relative(cf::intensity_transient(p, t, cf::all_intensity_readings[r]).values, exact));
    }
    std::string detail;
    for (std::size_t r = 0; r < dev.size(); ++r) {
        detail += fmt("\n      %-16s", cf::to_string(cf::all_intensity_readings[r])) + list(dev[r]);
        detail += analysis::strictly_decreasing(dev[r]) ? " (decreasing)" : " (NOT decreasing)";
    }
    const std::vector<double>& printed = dev[0];
    const bool ok = printed.back() < 0.05 && analysis::strictly_decreasing(printed);
    return {ok, "sup relative deviation at g = 5,10,20,50 (printed reading is the default):" + detail};
}

// 10 ------------------------------------------------------------------------
Outcome figures() {
    using namespace qwsq::cli;
    auto fig = [](const std::string& n) {
        RunConfig c;
        c.command = "figure";
        c.figure = n;
        return c;
    };
    auto col = [](const io::Dataset& ds, const std::string& name) -> const std::vector<double>& {
        const auto it = std::find(ds.columns.begin(), ds.columns.end(), name);
        if (it == ds.columns.end()) throw std::runtime_error("missing column " + name);
        return ds.data[static_cast<std::size_t>(it - ds.columns.begin())];
    };
    std::vector<std::string> failures;
    auto expect = [&](bool cond, const std::string& what) {
        if (!cond) failures.push_back(what);
    };

    // 2: starts at n_e0 = 1, ends near the steady value
    const RunResult f2 = run(fig("2"));
    expect(f2.exit_code == 0, "figure 2 exit");
    for (double e : {0.1, 0.5, 0.9}) {
        const auto& v = col(f2.dataset, "eps=" + io::format_double(e) + "_closed");
        expect(std::abs(v.front() - 1.0) < 1e-12, "figure 2 initial value");
    }

    // 3: exceeds unity at eps = 0.95
    const RunResult f3 = run(fig("3"));
    expect(f3.exit_code == 0, "figure 3 exit");
    const auto& v95 = col(f3.dataset, "eps=" + io::format_double(0.95) + "_closed");
    const double max95 = *std::max_element(v95.begin(), v95.end());
    expect(max95 > 1.0, "figure 3 maximum > 1");

    // 4: normalised at +g, narrowing with eps
    RunConfig c4 = fig("4");
    c4.points = 1201;
    const RunResult f4 = run(c4);
    expect(f4.exit_code == 0, "figure 4 exit");
    const auto& w = col(f4.dataset, "omega");
    std::vector<double> widths;
    for (double e : {0.1, 0.5, 0.9}) {
        const auto& s = col(f4.dataset, "eps=" + io::format_double(e) + "_closed");
        expect(s[analysis::nearest_index(w, 5.0)] == 1.0, "figure 4 S_N(g) = 1");
        widths.push_back(analysis::peak_fwhm(w, s, 5.0));
    }
    expect(analysis::strictly_decreasing(widths), "figure 4 widths");

    // g2: zero-delay bunching value per series
    const RunResult fg = run(fig("g2"));
    expect(fg.exit_code == 0, "figure g2 exit");
    for (double e : {0.1, 0.5, 0.9}) {
        const double g0 = col(fg.dataset, "eps=" + io::format_double(e) + "_closed").front();
        expect(std::abs(g0 - (2.0 + 4.0 / (4.0 * e * e))) < 1e-9, "figure g2 zero delay");
    }

    // qv: dips below 1 after t = 0, flat at the steady value by the end
    const RunResult fq = run(fig("qv"));
    expect(fq.exit_code == 0, "figure qv exit");
    double spread_max = 0.0;
    for (double e : {0.5, 0.9}) {
        const auto& v = col(fq.dataset, "eps=" + io::format_double(e) + "_closed");
        expect(v.front() >= 1.0, "figure qv starts at or above 1");
        expect(*std::min_element(v.begin() + 1, v.end()) < 1.0, "figure qv crosses below 1");
        const double steady = cf::quadrature_steady(test::params(1.0, 1.0, 5.0, e)).var_b2;
        const auto tail = v.begin() + static_cast<std::ptrdiff_t>(0.9 * static_cast<double>(v.size()));
        const auto [lo, hi] = std::minmax_element(tail, v.end());
        spread_max = std::max(spread_max, std::max(std::abs(*hi - steady), std::abs(*lo - steady)));
    }
    expect(spread_max < 1e-3, "figure qv flattens to the steady variance");

    std::string detail = fmt("fig 3 max %.4f; fig 4 FWHM ", max95) + list(widths) +
                         fmt("; qv tail within %.1e of steady", spread_max);
    for (const std::string& f : failures) detail += "; FAILED: " + f;
    return {failures.empty(), detail};
}

struct Criterion {
    int id;
    const char* name;
    double limit_s;
    std::function<Outcome()> fn;
};

}  // namespace

int main() {
    const std::vector<Criterion> criteria = {
        {1, "initial condition", 1.0, initial_condition},
        {2, "steady intensity", 1.0, steady_intensity},
        {3, "single-mode limit", 0.1, single_mode_limit},
        {4, "bunching", 2.0, bunching},
        {5, "squeezing ceiling", 0.1, squeezing_ceiling},
        {6, "spectrum structure", 5.0, spectrum_structure},
        {7, "commutator conservation", 2.0, commutator_conservation},
        {8, "integrator order", 3.0, integrator_order},
        {9, "transient intensity", 3.0, transient_intensity},
        {10, "figure reproduction", 5.0, figures},
    };
    int failed = 0;
    for (const Criterion& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.fn();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const bool in_time = secs < c.limit_s;
        const bool pass = o.pass && in_time;
        if (!pass) ++failed;
        std::printf("[%s] %2d %-24s %.3f s (limit %.1f s%s)  %s\n", pass ? "PASS" : "FAIL", c.id, c.name, secs,
                    c.limit_s, in_time ? "" : ", exceeded", o.detail.c_str());
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
