// errors.hpp - exception types shared by all layers.

#pragma once

#include <stdexcept>
#include <string>

namespace qwsq {

/// Input that describes an unphysical or unsupported system.
class ParameterError : public std::invalid_argument {
public:
    enum class Kind { AboveThreshold, NegativeRate, NonFinite, ZeroCoupling };

    ParameterError(Kind kind, const std::string& what)
        : std::invalid_argument(what), kind_(kind) {}

    Kind kind() const noexcept { return kind_; }

private:
    Kind kind_;
};

/// A computation that cannot deliver a trustworthy number.
class NumericalError : public std::runtime_error {
public:
    enum class Kind { StepTooLarge, TruncationTooShort, Unstable, DivisionByZero };

    NumericalError(Kind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}

    Kind kind() const noexcept { return kind_; }

private:
    Kind kind_;
};

}  // namespace qwsq
