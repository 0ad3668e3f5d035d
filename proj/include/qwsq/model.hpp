// model.hpp - physical parameters of the quantum-well / subthreshold-OPO
// system, parameter validation and the derived eigenstructure.
//
// All rates share one (arbitrary) unit of inverse time. The CLI scales by the
// exciton decay rate gamma, the library does not care.

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <string>

#include "qwsq/errors.hpp"

namespace qwsq {

using cplx = std::complex<double>;

struct SystemParams {
    double kappa{1.0};    // cavity decay rate
    double gamma{1.0};    // exciton spontaneous-emission rate
    double g{5.0};        // exciton-cavity coupling
    double epsilon{0.5};  // pump amplitude of the parametric process
    double n_e0{1.0};     // initial mean exciton number (cavity starts in vacuum)
};

/// Parameters that passed validate_params(). Only this type is accepted by
/// the closed-form and oracle layers, so the subthreshold condition is a
/// precondition nobody downstream needs to re-check.
class ValidatedParams {
public:
    const SystemParams& raw() const noexcept { return p_; }
    double kappa() const noexcept { return p_.kappa; }
    double gamma() const noexcept { return p_.gamma; }
    double g() const noexcept { return p_.g; }
    double epsilon() const noexcept { return p_.epsilon; }
    double n_e0() const noexcept { return p_.n_e0; }

    /// kappa + gamma, the total loss that appears in almost every formula.
    double loss() const noexcept { return p_.kappa + p_.gamma; }

private:
    explicit ValidatedParams(const SystemParams& p) : p_(p) {}
    friend ValidatedParams validate_params(const SystemParams& p);

    SystemParams p_;
};

inline ValidatedParams validate_params(const SystemParams& p) {
    using K = ParameterError::Kind;
    const auto check = [](double v, const char* name) {
        if (!std::isfinite(v))
            throw ParameterError(K::NonFinite, std::string(name) + " must be finite");
        if (v < 0.0)
            throw ParameterError(K::NegativeRate,
                                 std::string(name) + " must be non-negative (got " +
                                     std::to_string(v) + ")");
    };
    check(p.kappa, "kappa");
    check(p.gamma, "gamma");
    check(p.g, "g");
    check(p.epsilon, "epsilon");
    check(p.n_e0, "n_e0");
    // Strict: the steady state diverges on the boundary itself.
    if (!(p.kappa + p.gamma > 2.0 * p.epsilon))
        throw ParameterError(K::AboveThreshold,
                             "threshold violated: kappa + gamma = " +
                                 std::to_string(p.kappa + p.gamma) +
                                 " must exceed 2*epsilon = " +
                                 std::to_string(2.0 * p.epsilon) +
                                 " (parametric oscillator must stay below threshold)");
    return ValidatedParams(p);
}

/// Complex rates governing the two decoupled quadrature pairs.
///
/// delta  = sqrt(-16 g^2 + (gamma - kappa + 2 eps)^2)   (pair a+, b+)
/// lambda = sqrt(-16 g^2 + (gamma - kappa - 2 eps)^2)   (pair a-, b-)
///
/// Both are principal square roots of a real radicand, so in the
/// underdamped case they are purely imaginary with non-negative imaginary
/// part, and 4ig in the strong-coupling limit.
struct EigenStructure {
    cplx delta;
    cplx lambda;
    double gamma_minus;  // (kappa + gamma - 2 eps) / 4
    double gamma_plus;   // (kappa + gamma + 2 eps) / 4
};

inline EigenStructure eigen_structure(const ValidatedParams& p) {
    const double g = p.g();
    const double dp = p.gamma() - p.kappa() + 2.0 * p.epsilon();
    const double dm = p.gamma() - p.kappa() - 2.0 * p.epsilon();
    const double g16 = 16.0 * g * g;
    EigenStructure es;
    // +0.0 imaginary part keeps std::sqrt on the upper branch.
    es.delta = std::sqrt(cplx(dp * dp - g16, 0.0));
    es.lambda = std::sqrt(cplx(dm * dm - g16, 0.0));
    es.gamma_minus = 0.25 * (p.loss() - 2.0 * p.epsilon());
    es.gamma_plus = 0.25 * (p.loss() + 2.0 * p.epsilon());
    return es;
}

/// max(kappa, gamma, 2 eps) / (4 g). Small values mean the strong-coupling
/// formulas are trustworthy; infinite when g = 0.
inline double strong_coupling_quality(const ValidatedParams& p) {
    const double num = std::max({p.kappa(), p.gamma(), 2.0 * p.epsilon()});
    if (p.g() == 0.0) return std::numeric_limits<double>::infinity();
    return num / (4.0 * p.g());
}

/// The strong-coupling formulas carry 1/g factors.
inline void require_coupling(const ValidatedParams& p) {
    if (!(p.g() > 0.0))
        throw ParameterError(ParameterError::Kind::ZeroCoupling,
                             "closed-form layer assumes strong coupling (g >> kappa, gamma); "
                             "g must be positive");
}

}  // namespace qwsq
