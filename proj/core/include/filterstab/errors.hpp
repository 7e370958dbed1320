#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace filterstab {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed model or configuration text. The message carries the field path
/// and, for syntax errors, the line/column reported by the JSON reader.
class ParseError : public Error {
public:
    using Error::Error;
};

/// One broken model invariant, e.g. where = "transition[1] row 0".
struct Violation {
    std::string where;
    std::string message;

    std::string to_string() const { return where + ": " + message; }
};

class ModelError : public Error {
public:
    explicit ModelError(std::vector<Violation> violations);

    const std::vector<Violation>& violations() const noexcept { return violations_; }

private:
    std::vector<Violation> violations_;
};

/// The observation has probability zero under the current predictor.
class ZeroLikelihood : public Error {
public:
    ZeroLikelihood(std::size_t observation, std::optional<std::size_t> time);

    std::size_t observation() const noexcept { return observation_; }
    std::optional<std::size_t> time() const noexcept { return time_; }

private:
    std::size_t observation_;
    std::optional<std::size_t> time_;
};

/// mu is not absolutely continuous with respect to nu.
class AbsoluteContinuityError : public Error {
public:
    explicit AbsoluteContinuityError(std::size_t state);

    std::size_t state() const noexcept { return state_; }

private:
    std::size_t state_;
};

/// An exact enumeration would exceed its configured path budget.
class EnumerationLimitError : public Error {
public:
    EnumerationLimitError(double required, double limit);

    double required() const noexcept { return required_; }
    double limit() const noexcept { return limit_; }

private:
    double required_;
    double limit_;
};

class ConvergenceError : public Error {
public:
    ConvergenceError(std::size_t sweeps, double residual);

    std::size_t sweeps() const noexcept { return sweeps_; }
    double residual() const noexcept { return residual_; }

private:
    std::size_t sweeps_;
    double residual_;
};

} // namespace filterstab
