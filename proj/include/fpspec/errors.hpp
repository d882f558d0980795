#pragma once

#include <stdexcept>
#include <string>

namespace fpspec {

/// Malformed or out-of-contract user input (shapes, NaN, inconsistent data).
class InputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A numerical routine failed to meet its accuracy contract.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Internal invariant broken; indicates a bug rather than bad input.
class ConsistencyError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

class SizeError : public std::length_error {
public:
    using std::length_error::length_error;
};

class ConfigurationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Thrown when the Green's kernel is too degenerate to evaluate at the
/// requested time; carries the smallest time that passes the guard.
class DegenerateTimeError : public std::runtime_error {
public:
    DegenerateTimeError(const std::string& what, double smallest_safe_t)
        : std::runtime_error(what), smallest_safe_t_(smallest_safe_t) {}

    double smallest_safe_t() const noexcept { return smallest_safe_t_; }

private:
    double smallest_safe_t_;
};

} // namespace fpspec
