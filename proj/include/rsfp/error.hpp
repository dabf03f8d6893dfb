#pragma once

#include <stdexcept>
#include <string>

namespace rsfp {

/// Malformed or invariant-violating input (bad Q-matrix, kernel without the
/// q-property, out-of-range index, ...).
class InputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A numerical procedure could not deliver its stated accuracy (quadrature
/// non-convergence, overflow in a matrix exponential, leakage at a boundary).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Configuration text could not be parsed; carries the offending line and key.
class ConfigError : public std::runtime_error {
public:
    ConfigError(int line, std::string key, const std::string& what)
        : std::runtime_error("line " + std::to_string(line) + " [" + key + "]: " + what),
          line_(line), key_(std::move(key)) {}

    int line() const noexcept { return line_; }
    const std::string& key() const noexcept { return key_; }

private:
    int line_;
    std::string key_;
};

}  // namespace rsfp
