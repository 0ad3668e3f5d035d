// oracle.hpp - approximation-free second-moment dynamics.
//
// The Langevin equations are linear, so with delta-correlated noise the
// ordered moment matrix S_ij = <v_i v_j>, v = (a, a^dag, b, b^dag), obeys the
// closed equation
//
//     dS/dt = A S + S A^T + D.
//
// Steady state solves the Lyapunov equation A S + S A^T + D = 0. Two-time
// correlations w(tau) = <b^dag(0) v(tau)> follow the regression rule
// dw/dtau = A w. Nothing here depends on g being large.

#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "qwsq/errors.hpp"
#include "qwsq/model.hpp"
#include "qwsq/series.hpp"

namespace qwsq::oracle {

// Operator indices into v = (a, a^dag, b, b^dag).
enum Mode : int { a = 0, a_dag = 1, b = 2, b_dag = 3 };

using Matrix4 = Eigen::Matrix4d;
using Matrix4c = Eigen::Matrix4cd;
using Vector4c = Eigen::Vector4cd;

struct Generators {
    Matrix4 drift = Matrix4::Zero();      // A: dv/dt = A v + F
    Matrix4 diffusion = Matrix4::Zero();  // D: <F_i(t) F_j(t')> = D_ij delta(t - t')
};

inline Generators build_generators(const ValidatedParams& p) {
    const double hk = 0.5 * p.kappa(), hg = 0.5 * p.gamma();
    const double g = p.g(), e = p.epsilon();
    Generators gen;
    // clang-format off
    gen.drift <<  -hk,   e,    g,   0.0,
                    e, -hk,  0.0,     g,
                   -g, 0.0,  -hg,   0.0,
                  0.0,  -g,  0.0,   -hg;
    // clang-format on
    gen.diffusion(a, a_dag) = p.kappa();
    gen.diffusion(b, b_dag) = p.gamma();
    return gen;
}

/// Largest real part over the eigenvalues of the drift.
inline double spectral_abscissa(const Generators& gen) {
    Eigen::EigenSolver<Matrix4> es(gen.drift, /*computeEigenvectors=*/false);
    return es.eigenvalues().real().maxCoeff();
}

/// Integrator step ceiling min(1/(40 g), 1/(10 (kappa + gamma))), read back
/// from the drift. Infinite for frozen dynamics.
inline double step_ceiling(const Generators& gen) {
    const double g = std::abs(gen.drift(a, b));
    const double loss = -2.0 * (gen.drift(a, a) + gen.drift(b, b));
    double h = std::numeric_limits<double>::infinity();
    if (g > 0.0) h = std::min(h, 1.0 / (40.0 * g));
    if (loss > 0.0) h = std::min(h, 1.0 / (10.0 * loss));
    return h;
}

// ---------------------------------------------------------------------------

/// Ordered second moments at one instant.
struct MomentState {
    Matrix4c S = Matrix4c::Zero();
    double t{0.0};

    double photon_number() const { return S(a_dag, a).real(); }
    double exciton_number() const { return S(b_dag, b).real(); }
    cplx exciton_squared() const { return S(b, b); }  // <b^2>
};

/// Canonical commutators: C[a][a^dag] = [a, a^dag] = 1, C[b][b^dag] = 1.
inline Matrix4 commutator_matrix() {
    Matrix4 c = Matrix4::Zero();
    c(a, a_dag) = 1.0;
    c(a_dag, a) = -1.0;
    c(b, b_dag) = 1.0;
    c(b_dag, b) = -1.0;
    return c;
}

/// ||(S - S^T) - C||_inf (max-entry norm).
inline double commutator_defect(const MomentState& m) {
    const Matrix4c diff = m.S - m.S.transpose() - commutator_matrix().cast<cplx>();
    return diff.cwiseAbs().maxCoeff();
}

/// max |S_ij - conj(S_{j* i*})| with a <-> a^dag, b <-> b^dag.
inline double hermiticity_defect(const MomentState& m) {
    constexpr int conj_index[4] = {a_dag, a, b_dag, b};
    double worst = 0.0;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            worst = std::max(worst, std::abs(m.S(i, j) - std::conj(m.S(conj_index[j], conj_index[i]))));
    return worst;
}

/// Vacuum cavity, exciton with mean number n_e0 and no anomalous moments.
inline MomentState initial_moments(const ValidatedParams& p) {
    MomentState m;
    m.S(a, a_dag) = 1.0;
    m.S(b, b_dag) = 1.0 + p.n_e0();
    m.S(b_dag, b) = p.n_e0();
    m.t = 0.0;
    return m;
}

// ---------------------------------------------------------------------------

struct PropagationOptions {
    // Fixed RK4 step; defaults to step_ceiling(). Must not exceed the ceiling.
    std::optional<double> step;
    // Take several steps between output points when their spacing exceeds
    // the step. When false, such a grid is rejected with StepTooLarge.
    bool substep{true};
};

namespace detail {

inline double resolve_step(const Generators& gen, const PropagationOptions& opts) {
    const double ceiling = step_ceiling(gen);
    const double h = opts.step.value_or(ceiling);
    if (!(h > 0.0)) throw std::invalid_argument("integrator step must be positive");
    if (h > ceiling * (1.0 + 1e-12))
        throw NumericalError(NumericalError::Kind::StepTooLarge,
                             "requested step " + std::to_string(h) + " exceeds the ceiling " +
                                 std::to_string(ceiling));
    return h;
}

inline int substeps(double span, double h, bool allow) {
    if (span <= h * (1.0 + 1e-12)) return 1;
    if (!allow)
        throw NumericalError(NumericalError::Kind::StepTooLarge,
                             "grid spacing " + std::to_string(span) + " exceeds the integrator step " +
                                 std::to_string(h) + " and substepping is disabled");
    return static_cast<int>(std::ceil(span / h - 1e-9));
}

// Classical RK4 for any linear autonomous right-hand side.
template <class State, class Rhs>
State rk4(const State& y, double h, const Rhs& f) {
    const State k1 = f(y);
    const State k2 = f(State(y + (0.5 * h) * k1));
    const State k3 = f(State(y + (0.5 * h) * k2));
    const State k4 = f(State(y + h * k3));
    return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

template <class State, class Rhs>
std::vector<State> integrate(const State& y0, double t0, const std::vector<double>& grid, double h, bool allow_substeps,
                             const Rhs& f) {
    if (grid.empty()) return {};
    if (!strictly_increasing(grid)) throw std::invalid_argument("grid must be strictly increasing");
    if (grid.front() < t0) throw std::invalid_argument("grid starts before the initial state");
    std::vector<State> out;
    out.reserve(grid.size());
    State y = y0;
    double t = t0;
    for (double target : grid) {
        const double span = target - t;
        if (span > 0.0) {
            const int n = substeps(span, h, allow_substeps);
            const double dt = span / n;
            for (int k = 0; k < n; ++k) y = rk4(y, dt, f);
        }
        t = target;
        out.push_back(y);
    }
    return out;
}

}  // namespace detail

/// Fixed-step RK4 for dS/dt = A S + S A^T + D, sampled on `grid`
/// (grid.front() >= S0.t; a sample at S0.t returns S0 itself).
inline std::vector<MomentState> propagate_moments(const Generators& gen, const MomentState& s0,
                                                  const std::vector<double>& grid,
                                                  const PropagationOptions& opts = {}) {
    const double h = detail::resolve_step(gen, opts);
    const Matrix4c A = gen.drift.cast<cplx>();
    const Matrix4c At = A.transpose();
    const Matrix4c D = gen.diffusion.cast<cplx>();
    const auto rhs = [&](const Matrix4c& S) -> Matrix4c { return A * S + S * At + D; };
    const std::vector<Matrix4c> raw = detail::integrate<Matrix4c>(s0.S, s0.t, grid, h, opts.substep, rhs);
    std::vector<MomentState> out(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i) out[i] = {raw[i], grid[i]};
    return out;
}

/// Stationary moments from the 16x16 Kronecker form
///   (I (x) A + A (x) I) vec(S) = -vec(D)   (column-major vec).
inline MomentState steady_moments(const Generators& gen) {
    const double abscissa = spectral_abscissa(gen);
    if (!(abscissa < 0.0))
        throw NumericalError(NumericalError::Kind::Unstable,
                             "drift is not Hurwitz (spectral abscissa " + std::to_string(abscissa) +
                                 "); no steady state exists");
    using Matrix16 = Eigen::Matrix<double, 16, 16>;
    using Vector16 = Eigen::Matrix<double, 16, 1>;
    const Matrix4& A = gen.drift;
    Matrix16 L = Matrix16::Zero();
    for (int j = 0; j < 4; ++j) L.block<4, 4>(4 * j, 4 * j) += A;  // I (x) A
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) L.block<4, 4>(4 * i, 4 * j) += A(i, j) * Matrix4::Identity();  // A (x) I
    const Vector16 rhs = -Eigen::Map<const Vector16>(gen.diffusion.data());
    const Eigen::FullPivLU<Matrix16> lu(L);
    Vector16 x = lu.solve(rhs);
    x += lu.solve(rhs - L * x);  // one step of iterative refinement
    MomentState m;
    m.S = Eigen::Map<const Matrix4>(x.data()).cast<cplx>();
    m.t = std::numeric_limits<double>::infinity();
    return m;
}

/// ||A S + S A^T + D||_inf for a candidate steady state.
inline double lyapunov_residual(const Generators& gen, const MomentState& m) {
    const Matrix4c A = gen.drift.cast<cplx>();
    return (A * m.S + m.S * A.transpose() + gen.diffusion.cast<cplx>()).cwiseAbs().maxCoeff();
}

// ---------------------------------------------------------------------------

struct RegressionSeries {
    std::vector<double> tau;
    std::vector<cplx> bdag_b;     // <b^dag(0) b(tau)>_ss
    std::vector<cplx> bdag_bdag;  // <b^dag(0) b^dag(tau)>_ss
};

/// Quantum regression for the row <b^dag(0) v(tau)>, starting from the
/// stationary moments at tau = 0.
inline RegressionSeries regression_correlations(const Generators& gen, const MomentState& steady,
                                                const std::vector<double>& tau_grid,
                                                const PropagationOptions& opts = {}) {
    const double h = detail::resolve_step(gen, opts);
    if (!tau_grid.empty() && tau_grid.front() < 0.0) throw std::invalid_argument("delay grid must start at tau >= 0");
    const Matrix4c A = gen.drift.cast<cplx>();
    const Vector4c w0 = steady.S.row(b_dag).transpose();
    const auto rhs = [&](const Vector4c& w) -> Vector4c { return A * w; };
    const std::vector<Vector4c> raw = detail::integrate<Vector4c>(w0, 0.0, tau_grid, h, opts.substep, rhs);
    RegressionSeries out;
    out.tau = tau_grid;
    out.bdag_b.reserve(raw.size());
    out.bdag_bdag.reserve(raw.size());
    for (const Vector4c& w : raw) {
        out.bdag_b.push_back(w(b));
        out.bdag_bdag.push_back(w(b_dag));
    }
    return out;
}

/// Delay horizon 60/(kappa + gamma - 2 eps). The slowest correlation decays
/// at gamma_- = (kappa + gamma - 2 eps)/4, so the tail is down by e^{-15};
/// at 40/(...) its prefactor can leave it just above the 1e-4 tail check.
inline double spectrum_horizon(const ValidatedParams& p) { return 60.0 / (p.loss() - 2.0 * p.epsilon()); }

/// S(omega) = (1/pi) Re int_0^T e^{i omega tau} C(tau)/C(0) dtau, composite
/// trapezoid on the sampled tau grid.
///
/// The tail check takes the largest |C| over the final 5% of samples, which
/// covers whole oscillation periods of an envelope-modulated correlation;
/// that must stay below 1e-4 |C(0)|.
inline ObservableSeries spectrum_numeric(const std::vector<double>& tau_grid, const std::vector<cplx>& corr,
                                         const std::vector<double>& omega_grid) {
    if (tau_grid.size() != corr.size() || tau_grid.size() < 2)
        throw std::invalid_argument("correlation samples must match a delay grid of at least two points");
    if (!strictly_increasing(tau_grid) || !strictly_increasing(omega_grid))
        throw std::invalid_argument("grids must be strictly increasing");
    const double c0 = std::abs(corr.front());
    if (!(c0 > 0.0))
        throw NumericalError(NumericalError::Kind::DivisionByZero, "correlation vanishes at zero delay");
    const std::size_t n = tau_grid.size();
    const std::size_t tail_begin = n - std::max<std::size_t>(1, n / 20);
    double tail = 0.0;
    for (std::size_t k = tail_begin; k < n; ++k) tail = std::max(tail, std::abs(corr[k]));
    if (tail > 1e-4 * c0)
        throw NumericalError(NumericalError::Kind::TruncationTooShort,
                             "correlation tail " + std::to_string(tail / c0) +
                                 " of its zero-delay value exceeds 1e-4; extend the delay horizon");

    ObservableSeries out;
    out.kind = ObservableKind::spectrum;
    out.layer = Layer::oracle;
    out.grid = omega_grid;
    out.values.reserve(omega_grid.size());
    const cplx norm = 1.0 / corr.front();
    std::vector<cplx> c(n);
    for (std::size_t k = 0; k < n; ++k) c[k] = corr[k] * norm;
    for (double w : omega_grid) {
        double acc = 0.0;
        double prev = c[0].real();  // e^{i w 0} = 1
        for (std::size_t k = 1; k < n; ++k) {
            const double ph = w * tau_grid[k];
            const double cur = std::cos(ph) * c[k].real() - std::sin(ph) * c[k].imag();
            acc += 0.5 * (prev + cur) * (tau_grid[k] - tau_grid[k - 1]);
            prev = cur;
        }
        out.values.push_back(acc / std::numbers::pi);
    }
    return out;
}

/// Gaussian factorization of <b^dag b^dag(tau) b(tau) b> normalised by <b^dag b>^2.
inline ObservableSeries g2_numeric(const Generators& gen, const MomentState& steady,
                                   const std::vector<double>& tau_grid, const PropagationOptions& opts = {}) {
    const double n = steady.exciton_number();
    if (!(n > 1e-14))
        throw NumericalError(NumericalError::Kind::DivisionByZero,
                             "g2 is undefined: steady exciton number is zero (no pump)");
    const RegressionSeries r = regression_correlations(gen, steady, tau_grid, opts);
    ObservableSeries out;
    out.kind = ObservableKind::g2;
    out.layer = Layer::oracle;
    out.grid = tau_grid;
    out.values.reserve(tau_grid.size());
    const double n2 = n * n;
    for (std::size_t k = 0; k < tau_grid.size(); ++k)
        out.values.push_back(1.0 + std::norm(r.bdag_bdag[k]) / n2 + std::norm(r.bdag_b[k]) / n2);
    return out;
}

struct QuadratureSeries {
    ObservableSeries var_b1;
    ObservableSeries var_b2;
};

/// var(b1) = 1 + 2<b^dag b> + 2 Re<b^2>, var(b2) = 1 + 2<b^dag b> - 2 Re<b^2>
/// (first moments vanish for the states built here).
inline QuadratureSeries quadratures_from_moments(const std::vector<MomentState>& states) {
    QuadratureSeries out;
    out.var_b1.kind = ObservableKind::var_b1;
    out.var_b2.kind = ObservableKind::var_b2;
    for (ObservableSeries* s : {&out.var_b1, &out.var_b2}) {
        s->layer = Layer::oracle;
        s->grid.reserve(states.size());
        s->values.reserve(states.size());
    }
    for (const MomentState& m : states) {
        const double nb = m.exciton_number();
        const double re_b2 = m.exciton_squared().real();
        out.var_b1.grid.push_back(m.t);
        out.var_b2.grid.push_back(m.t);
        out.var_b1.values.push_back(1.0 + 2.0 * nb + 2.0 * re_b2);
        out.var_b2.values.push_back(1.0 + 2.0 * nb - 2.0 * re_b2);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Convenience drivers used by the CLI and the comparison reports.

inline ObservableSeries intensity_series(const ValidatedParams& p, const std::vector<double>& grid,
                                         const PropagationOptions& opts = {}) {
    const Generators gen = build_generators(p);
    const std::vector<MomentState> states = propagate_moments(gen, initial_moments(p), grid, opts);
    ObservableSeries out;
    out.kind = ObservableKind::intensity;
    out.layer = Layer::oracle;
    out.params = p.raw();
    out.grid = grid;
    out.values.reserve(states.size());
    for (const MomentState& m : states) out.values.push_back(m.exciton_number());
    return out;
}

inline QuadratureSeries quadrature_series(const ValidatedParams& p, const std::vector<double>& grid,
                                          const PropagationOptions& opts = {}) {
    const Generators gen = build_generators(p);
    QuadratureSeries q = quadratures_from_moments(propagate_moments(gen, initial_moments(p), grid, opts));
    q.var_b1.params = q.var_b2.params = p.raw();
    return q;
}

/// Normalised steady correlation <b^dag b(tau)>/<b^dag b> on `tau_grid`.
inline std::vector<cplx> normalized_correlation(const ValidatedParams& p, const std::vector<double>& tau_grid) {
    const Generators gen = build_generators(p);
    const MomentState ss = steady_moments(gen);
    const double n = ss.exciton_number();
    if (!(n > 1e-14))
        throw NumericalError(NumericalError::Kind::DivisionByZero,
                             "correlation normalisation undefined: steady exciton number is zero");
    RegressionSeries r = regression_correlations(gen, ss, tau_grid);
    for (cplx& z : r.bdag_b) z /= n;
    return std::move(r.bdag_b);
}

/// Regression + numerical transform over [0, spectrum_horizon(p)], with a
/// delay step fine enough for the largest |omega| requested.
inline ObservableSeries spectrum_series(const ValidatedParams& p, const std::vector<double>& omega_grid,
                                        bool normalized) {
    if (omega_grid.empty()) throw std::invalid_argument("empty frequency grid");
    const Generators gen = build_generators(p);
    const MomentState ss = steady_moments(gen);
    const double wmax = std::max({std::abs(omega_grid.front()), std::abs(omega_grid.back()), p.g(), 1e-300});
    const double dtau = std::min(step_ceiling(gen), 0.1 / wmax);
    const double horizon = spectrum_horizon(p);
    const auto count = static_cast<std::size_t>(std::ceil(horizon / dtau)) + 1;
    const std::vector<double> tau = linspace(0.0, horizon, count);
    const RegressionSeries r = regression_correlations(gen, ss, tau);

    ObservableSeries out = spectrum_numeric(tau, r.bdag_b, omega_grid);
    out.params = p.raw();
    if (normalized) {
        const double at_g = spectrum_numeric(tau, r.bdag_b, {p.g()}).values.front();
        for (double& v : out.values) v /= at_g;
        out.kind = ObservableKind::spectrum_normalized;
    }
    return out;
}

inline ObservableSeries g2_series(const ValidatedParams& p, const std::vector<double>& tau_grid) {
    const Generators gen = build_generators(p);
    ObservableSeries out = g2_numeric(gen, steady_moments(gen), tau_grid);
    out.params = p.raw();
    return out;
}

}  // namespace qwsq::oracle
