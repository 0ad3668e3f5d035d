// closed_form.hpp - analytic solution of the exciton/cavity Langevin system.
//
// Two families of propagator coefficients are provided: the exact ones
// (eta, valid for any g, evaluated with the complex rates delta/lambda) and
// their strong-coupling limit (lambda, delta = lambda = 4ig). The observables
// below are the strong-coupling expressions; the 1/g pieces they keep are
// only meaningful when strong_coupling_quality() is small.
//
// Every growing cosh/sinh factor is folded into its decaying envelope before
// evaluation, i.e. each term is a plain exponential e^{(+-eps/2 - (kappa + gamma)/4) t}
// times a bounded oscillation. Below threshold all of these decay, so nothing
// overflows at large t.

#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <utility>
#include <vector>

#include "qwsq/errors.hpp"
#include "qwsq/model.hpp"
#include "qwsq/series.hpp"

namespace qwsq::closed_form {

namespace detail {

// cosh(a x) e^{-b x}
inline double cosh_decay(double a, double x, double b) {
    return 0.5 * (std::exp((a - b) * x) + std::exp((-a - b) * x));
}

// sinh(a x) / a * e^{-b x}, finite as a -> 0
inline double sinh_over_decay(double a, double x, double b) {
    const double ax = a * x;
    if (std::abs(ax) < 1e-3)
        return x * (1.0 + ax * ax / 6.0 + ax * ax * ax * ax / 120.0) * std::exp(-b * x);
    return (std::exp((a - b) * x) - std::exp((-a - b) * x)) / (2.0 * a);
}

// Complex analogues for the exact coefficients.
inline cplx cosh_decay(cplx a, double x, double b) {
    return 0.5 * (std::exp((a - b) * x) + std::exp((-a - b) * x));
}

inline cplx sinh_over_decay(cplx a, double x, double b) {
    const cplx ax = a * x;
    if (std::abs(ax) < 1e-3)
        return x * (1.0 + ax * ax / 6.0 + ax * ax * ax * ax / 120.0) * std::exp(-b * x);
    return (std::exp((a - b) * x) - std::exp((-a - b) * x)) / (2.0 * a);
}

inline void require_time_grid(const std::vector<double>& grid) {
    if (grid.empty()) throw std::invalid_argument("empty grid");
    if (!strictly_increasing(grid)) throw std::invalid_argument("grid must be strictly increasing");
    if (grid.front() < 0.0) throw std::invalid_argument("time grid must start at t >= 0");
}

inline void require_pump(const ValidatedParams& p, const char* what) {
    if (!(p.epsilon() > 0.0))
        throw NumericalError(NumericalError::Kind::DivisionByZero,
                             std::string(what) +
                                 " is undefined without a pump: the steady exciton number is zero");
}

}  // namespace detail

/// Propagator coefficients at one instant. The operator solution reads
///   a(t) = eta1+ a + eta2+ a^dag + eta3+ b + eta3- b^dag + noise
///   b(t) = eta1- b + eta2- b^dag - eta3+ a - eta3- a^dag + noise
/// and identically with the lambda family in the strong-coupling limit
/// (lambda3 <-> eta3+, lambda4 <-> eta3-).
struct CoefficientSet {
    double t{0.0};

    double lambda1_plus{}, lambda1_minus{};
    double lambda2_plus{}, lambda2_minus{};
    double lambda3{}, lambda4{};

    double eta1_plus{}, eta1_minus{};
    double eta2_plus{}, eta2_minus{};
    double eta3_plus{}, eta3_minus{};

    // Largest |Im eta| over the six exact coefficients, relative to the
    // largest |eta|. Zero up to rounding for any valid input.
    double eta_imag_residual{0.0};
};

/// Both families at time t, with the exact family evaluated at the given
/// complex rates (normally eigen_structure(p); forcing delta = lambda = 4ig
/// reproduces the strong-coupling family).
inline CoefficientSet coefficients(const ValidatedParams& p, double t, const EigenStructure& es) {
    require_coupling(p);
    if (t < 0.0) throw std::invalid_argument("coefficients need t >= 0");

    const double kappa = p.kappa(), gamma = p.gamma(), g = p.g(), eps = p.epsilon();
    CoefficientSet cs;
    cs.t = t;

    // Strong-coupling family.
    const double quarter_loss = 0.25 * p.loss();
    const double ch = detail::cosh_decay(0.5 * eps, t, quarter_loss);
    const double sh = 0.5 * (std::exp((0.5 * eps - quarter_loss) * t) -
                             std::exp((-0.5 * eps - quarter_loss) * t));
    const double c = std::cos(g * t), s = std::sin(g * t);
    const double r = (gamma - kappa) / (4.0 * g);
    const double q = eps / (2.0 * g);
    cs.lambda1_plus = (c + r * s) * ch + q * s * sh;
    cs.lambda1_minus = (c - r * s) * ch - q * s * sh;
    cs.lambda2_plus = (c + r * s) * sh + q * s * ch;
    cs.lambda2_minus = (c - r * s) * sh - q * s * ch;
    cs.lambda3 = s * ch;
    cs.lambda4 = s * sh;

    // Exact family: the (a+, b+) pair evolves with delta and gamma_-, the
    // (a-, b-) pair with lambda and gamma_+.
    const cplx qd = 0.25 * es.delta, ql = 0.25 * es.lambda;
    const cplx cd = detail::cosh_decay(qd, t, es.gamma_minus);
    const cplx sd = 0.25 * detail::sinh_over_decay(qd, t, es.gamma_minus);  // sinh(dt/4)/d e^{..}
    const cplx cl = detail::cosh_decay(ql, t, es.gamma_plus);
    const cplx sl = 0.25 * detail::sinh_over_decay(ql, t, es.gamma_plus);

    const double kd = gamma - kappa + 2.0 * eps;
    const double kl = gamma - kappa - 2.0 * eps;
    const cplx f_plus = cd + kd * sd, f_minus = cd - kd * sd, f2 = 4.0 * g * sd;
    const cplx h_plus = cl + kl * sl, h_minus = cl - kl * sl, h2 = 4.0 * g * sl;

    const cplx e1p = 0.5 * (f_plus + h_plus);
    const cplx e1m = 0.5 * (f_minus + h_minus);
    const cplx e2p = 0.5 * (f_plus - h_plus);
    const cplx e2m = 0.5 * (f_minus - h_minus);
    const cplx e3p = 0.5 * (f2 + h2);
    const cplx e3m = 0.5 * (f2 - h2);

    double max_abs = 0.0, max_imag = 0.0;
    for (const cplx& z : {e1p, e1m, e2p, e2m, e3p, e3m}) {
        max_abs = std::max(max_abs, std::abs(z));
        max_imag = std::max(max_imag, std::abs(z.imag()));
    }
    cs.eta_imag_residual = max_abs > 0.0 ? max_imag / max_abs : max_imag;

    cs.eta1_plus = e1p.real();
    cs.eta1_minus = e1m.real();
    cs.eta2_plus = e2p.real();
    cs.eta2_minus = e2m.real();
    cs.eta3_plus = e3p.real();
    cs.eta3_minus = e3m.real();
    return cs;
}

inline CoefficientSet coefficients(const ValidatedParams& p, double t) {
    return coefficients(p, t, eigen_structure(p));
}

// ---------------------------------------------------------------------------
// Mean exciton number

/// Readings of the printed bracket  -(1/4g)[kappa - gamma + 2 eps (1 + 2 n) sin(gt)] sinh(eps t).
/// All differ at O(1/g) only; the oracle comparison reports each.
enum class IntensityReading {
    printed,             // sin(gt) multiplies only the 2 eps (1 + 2n) term
    sin_gt_bracket,      // sin(gt) multiplies the whole bracket
    sin_2gt_bracket,     // sin(2gt) multiplies the whole bracket
};

inline constexpr IntensityReading all_intensity_readings[] = {
    IntensityReading::printed, IntensityReading::sin_gt_bracket, IntensityReading::sin_2gt_bracket};

inline const char* to_string(IntensityReading r) {
    switch (r) {
        case IntensityReading::printed: return "printed";
        case IntensityReading::sin_gt_bracket: return "sin_gt_bracket";
        case IntensityReading::sin_2gt_bracket: return "sin_2gt_bracket";
    }
    return "unknown";
}

inline double intensity_steady(const ValidatedParams& p) {
    const double c = p.loss(), e = p.epsilon();
    return 2.0 * e * e / (c * c - 4.0 * e * e);
}

/// <b^dag b>(t) for a vacuum cavity and n_e0 initial excitons.
inline double intensity_at(const ValidatedParams& p, double t,
                           IntensityReading reading = IntensityReading::printed) {
    const double kappa = p.kappa(), gamma = p.gamma(), g = p.g(), eps = p.epsilon();
    const double n = p.n_e0();
    const double c = p.loss();
    const double x = c * c - 4.0 * eps * eps;

    const double half_loss = 0.5 * c;
    const double env = std::exp(-half_loss * t);
    const double ch = detail::cosh_decay(eps, t, half_loss);  // cosh(eps t) e^{-ct/2}
    const double sh =
        0.5 * (std::exp((eps - half_loss) * t) - std::exp((-eps - half_loss) * t));
    const double sh_half_sq = 0.5 * (ch - env);  // sinh^2(eps t/2) e^{-ct/2}

    const double s1 = std::sin(g * t);
    const double s2 = std::sin(2.0 * g * t);
    const double c2 = std::cos(2.0 * g * t);
    const double pump = 2.0 * eps * (1.0 + 2.0 * n);

    double bracket = 0.0;
    switch (reading) {
        case IntensityReading::printed: bracket = kappa - gamma + pump * s1; break;
        case IntensityReading::sin_gt_bracket: bracket = (kappa - gamma + pump) * s1; break;
        case IntensityReading::sin_2gt_bracket: bracket = (kappa - gamma + pump) * s2; break;
    }

    const double term1 = (1.0 + n + n * c2 + (kappa - gamma) / (4.0 * g) * (1.0 + 2.0 * n) * s2) * ch;
    const double term2 = bracket / (4.0 * g) * sh;
    const double term3 = c * (2.0 * eps * sh + c * ch) / x;
    const double term4 = (gamma - kappa) / (2.0 * g) * sh_half_sq * s2;
    return 2.0 * eps * eps / x + 0.5 * (term1 - term2 - term3 + term4);
}

inline ObservableSeries intensity_transient(const ValidatedParams& p, const std::vector<double>& grid,
                                            IntensityReading reading = IntensityReading::printed) {
    require_coupling(p);
    detail::require_time_grid(grid);
    ObservableSeries out;
    out.kind = ObservableKind::intensity;
    out.layer = Layer::closed_form;
    out.params = p.raw();
    out.strong_coupling_q = strong_coupling_quality(p);
    out.grid = grid;
    out.values.reserve(grid.size());
    for (double t : grid) out.values.push_back(intensity_at(p, t, reading));
    return out;
}

// ---------------------------------------------------------------------------
// Two-time correlation and spectrum

/// <b^dag(t) b(t+tau)>_ss / <b^dag b>_ss. The oscillating factor is taken
/// as cos(g tau): the expression is stationary and cannot depend on t.
inline double correlation_at(const ValidatedParams& p, double tau) {
    const double gamma = p.gamma(), g = p.g(), eps = p.epsilon();
    const double c = p.loss();
    const double x = c * c - 4.0 * eps * eps;
    const double q = 0.25 * c;
    const double sh_over = detail::sinh_over_decay(0.5 * eps, tau, q) * 0.5;  // sinh(eps tau/2)/eps e^{-c tau/4}
    const double ch = detail::cosh_decay(0.5 * eps, tau, q);
    return gamma * x / (4.0 * g * c) * std::sin(g * tau) * sh_over +
           std::cos(g * tau) * (ch + 0.5 * c * sh_over);
}

struct CorrelationSeries {
    ObservableSeries real;
    ObservableSeries imag;
};

inline CorrelationSeries correlation_steady(const ValidatedParams& p, const std::vector<double>& tau_grid) {
    require_coupling(p);
    detail::require_time_grid(tau_grid);
    CorrelationSeries out;
    out.real.kind = ObservableKind::correlation_re;
    out.imag.kind = ObservableKind::correlation_im;
    for (ObservableSeries* s : {&out.real, &out.imag}) {
        s->layer = Layer::closed_form;
        s->params = p.raw();
        s->strong_coupling_q = strong_coupling_quality(p);
        s->grid = tau_grid;
    }
    out.real.values.reserve(tau_grid.size());
    for (double tau : tau_grid) out.real.values.push_back(correlation_at(p, tau));
    out.imag.values.assign(tau_grid.size(), 0.0);
    return out;
}

/// Two pairs of Lorentzians with half-widths gamma_-, gamma_+ centred at +-g.
/// Each pair is a difference that vanishes with eps; it is evaluated through
///   (1/(gm^2+x^2) - 1/(gp^2+x^2)) / eps = (gp+gm) / ((gm^2+x^2)(gp^2+x^2))
/// so the eps -> 0 limit stays finite.
inline double spectrum_at(const ValidatedParams& p, double omega) {
    const double kappa = p.kappa(), gamma = p.gamma(), g = p.g();
    const EigenStructure es = eigen_structure(p);
    const double gm = es.gamma_minus, gp = es.gamma_plus;
    const double base = g * kappa + 3.0 * g * gamma;
    const auto pair = [&](double detuning) {
        const double x2 = detuning * detuning;
        return (gp + gm) / ((gm * gm + x2) * (gp * gp + x2));
    };
    const double lower = (base - 2.0 * gamma * omega) * pair(g - omega);
    const double upper = (base + 2.0 * gamma * omega) * pair(g + omega);
    return gp * gm / (2.0 * std::numbers::pi * g * p.loss()) * (lower + upper);
}

/// Samples S(omega); with `normalized` divides by S(g) so the value at +g is 1.
inline ObservableSeries spectrum_closed(const ValidatedParams& p, const std::vector<double>& omega_grid,
                                        bool normalized) {
    require_coupling(p);
    if (omega_grid.empty() || !strictly_increasing(omega_grid))
        throw std::invalid_argument("frequency grid must be non-empty and strictly increasing");
    ObservableSeries out;
    out.kind = normalized ? ObservableKind::spectrum_normalized : ObservableKind::spectrum;
    out.layer = Layer::closed_form;
    out.params = p.raw();
    out.strong_coupling_q = strong_coupling_quality(p);
    out.grid = omega_grid;
    const double scale = normalized ? 1.0 / spectrum_at(p, p.g()) : 1.0;
    out.values.reserve(omega_grid.size());
    for (double w : omega_grid) out.values.push_back(spectrum_at(p, w) * scale);
    return out;
}

/// Where the strong-coupling spectrum dips below zero. The 1/g terms make
/// the far wings (|omega| > 2g for kappa = gamma) slightly negative.
struct NegativityDiagnostic {
    bool negative{false};
    double min_value{0.0};
    double at_omega{0.0};
    double relative_to_peak{0.0};  // min_value / S(g)
};

inline NegativityDiagnostic spectrum_negativity(const ValidatedParams& p, const std::vector<double>& omega_grid) {
    require_coupling(p);
    NegativityDiagnostic d;
    d.min_value = INFINITY;
    for (double w : omega_grid) {
        const double s = spectrum_at(p, w);
        if (s < d.min_value) {
            d.min_value = s;
            d.at_omega = w;
        }
    }
    d.negative = d.min_value < 0.0;
    d.relative_to_peak = d.min_value / spectrum_at(p, p.g());
    return d;
}

// ---------------------------------------------------------------------------
// Autocorrelation

inline double g2_at(const ValidatedParams& p, double tau) {
    const double gamma = p.gamma(), g = p.g(), eps = p.epsilon();
    const double c = p.loss();
    const double x = c * c - 4.0 * eps * eps;
    const double half_loss = 0.5 * c;
    const double ch = detail::cosh_decay(eps, tau, half_loss);
    const double sh = 0.5 * (std::exp((eps - half_loss) * tau) - std::exp((-eps - half_loss) * tau));
    const double e2 = eps * eps;
    // mu1, mu2 already carry the e^{-(kappa + gamma) tau/2} envelope.
    const double mu1 = gamma * x / (4.0 * g * c * e2) * (c * ch + 2.0 * eps * sh);
    const double mu2 = ((c * c + 4.0 * e2) * ch + 4.0 * c * eps * sh) / (4.0 * e2);
    const double cg = std::cos(g * tau), sg = std::sin(g * tau);
    return 1.0 + cg * (mu1 * sg + mu2 * cg);
}

/// 2 + (kappa + gamma)^2 / (4 eps^2)
inline double g2_zero_delay(const ValidatedParams& p) {
    detail::require_pump(p, "g2(0)");
    const double c = p.loss(), e = p.epsilon();
    return 2.0 + c * c / (4.0 * e * e);
}

inline ObservableSeries g2_closed(const ValidatedParams& p, const std::vector<double>& tau_grid) {
    require_coupling(p);
    detail::require_pump(p, "g2");
    detail::require_time_grid(tau_grid);
    ObservableSeries out;
    out.kind = ObservableKind::g2;
    out.layer = Layer::closed_form;
    out.params = p.raw();
    out.strong_coupling_q = strong_coupling_quality(p);
    out.grid = tau_grid;
    out.values.reserve(tau_grid.size());
    for (double tau : tau_grid) out.values.push_back(g2_at(p, tau));
    return out;
}

// ---------------------------------------------------------------------------
// Quadrature variances

/// Readings of the transient variances. The printed B_+-(t) carries
/// e^{+-eps t/2}, which makes the non-oscillating transient decay at
/// (kappa + gamma)/2 instead of (kappa + gamma -+ 2 eps)/2 and contradicts both the intensity
/// expression (intensity = (var1 + var2 - 2)/4) and the exact dynamics.
/// `corrected` uses e^{-+eps t/2}; `printed` keeps the sign as written.
/// Both join the cos(2gt) and sin(2gt) terms of A_+-(t) with "+".
enum class QuadratureReading { corrected, printed };

inline const char* to_string(QuadratureReading r) {
    return r == QuadratureReading::corrected ? "corrected" : "printed";
}

struct QuadraturePair {
    double var_b1{1.0};
    double var_b2{1.0};
};

inline QuadraturePair quadrature_steady(const ValidatedParams& p) {
    const double c = p.loss(), e = p.epsilon();
    return {1.0 + 2.0 * e / (c - 2.0 * e), 1.0 - 2.0 * e / (c + 2.0 * e)};
}

namespace detail {

// sign = -1 gives var(b1), sign = +1 gives var(b2)
inline double quadrature_variance(const ValidatedParams& p, double t, double sign, QuadratureReading reading) {
    const double kappa = p.kappa(), gamma = p.gamma(), g = p.g(), eps = p.epsilon();
    const double n = p.n_e0();
    const double c = p.loss();
    const double se = sign * eps;

    const double steady = 1.0 - 2.0 * se / (c + 2.0 * se);
    const double env_a = std::exp(-(c + 2.0 * se) * t / 2.0);
    const double env_0 = std::exp(-c * t / 2.0);
    const double s2 = std::sin(2.0 * g * t), c2 = std::cos(2.0 * g * t);

    // e^{-(c+2se)t/2} A(t); the e^{se t} piece of A folds into e^{-ct/2}.
    const double a_term =
        env_a * (1.0 + n + n * c2 + (kappa - gamma + 2.0 * se) / (4.0 * g) * (1.0 + 2.0 * n) * s2) +
        env_0 * (gamma - kappa) / (4.0 * g) * s2;

    // e^{-(c+se)t/2} B(t)
    const double b_env = reading == QuadratureReading::printed ? env_0 : env_a;
    const double sinh_half = 0.5 * (std::exp(-(c + se - eps) * t / 2.0) - std::exp(-(c + se + eps) * t / 2.0));
    const double b_term = -c / (c + 2.0 * se) * b_env + sign * (kappa - gamma) / (2.0 * g) * sinh_half * s2;

    return steady + a_term + b_term;
}

}  // namespace detail

inline QuadraturePair quadrature_at(const ValidatedParams& p, double t,
                                    QuadratureReading reading = QuadratureReading::corrected) {
    return {detail::quadrature_variance(p, t, -1.0, reading), detail::quadrature_variance(p, t, +1.0, reading)};
}

struct QuadratureSeries {
    ObservableSeries var_b1;
    ObservableSeries var_b2;
};

inline QuadratureSeries quadrature_transient(const ValidatedParams& p, const std::vector<double>& grid,
                                             QuadratureReading reading = QuadratureReading::corrected) {
    require_coupling(p);
    detail::require_time_grid(grid);
    QuadratureSeries out;
    out.var_b1.kind = ObservableKind::var_b1;
    out.var_b2.kind = ObservableKind::var_b2;
    for (ObservableSeries* s : {&out.var_b1, &out.var_b2}) {
        s->layer = Layer::closed_form;
        s->params = p.raw();
        s->strong_coupling_q = strong_coupling_quality(p);
        s->grid = grid;
        s->values.reserve(grid.size());
    }
    for (double t : grid) {
        const QuadraturePair v = quadrature_at(p, t, reading);
        out.var_b1.values.push_back(v.var_b1);
        out.var_b2.values.push_back(v.var_b2);
    }
    return out;
}

}  // namespace qwsq::closed_form
