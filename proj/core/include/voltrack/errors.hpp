#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace voltrack {

// Invalid argument to a library call (bad k, theta <= 0, dimension mismatch...).
class ArgumentError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Bad input data. Carries the offending position when one is known: an
// observation index for series data, a 1-based line number for files.
class DataError : public std::runtime_error {
public:
    explicit DataError(const std::string& what, std::optional<std::size_t> position = std::nullopt)
        : std::runtime_error(what), position_(position) {}

    [[nodiscard]] std::optional<std::size_t> position() const noexcept { return position_; }

private:
    std::optional<std::size_t> position_;
};

// Malformed text input (CSV, scenario config).
class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Riccati iteration failed to converge.
class SolverError : public std::runtime_error {
public:
    SolverError(const std::string& what, double residual_norm)
        : std::runtime_error(what), residual_norm_(residual_norm) {}

    [[nodiscard]] double residual_norm() const noexcept { return residual_norm_; }

private:
    double residual_norm_;
};

class TuningError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ScenarioError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace voltrack
