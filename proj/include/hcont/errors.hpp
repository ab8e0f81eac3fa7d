/// \file errors.hpp
/// Exception categories. The CLI maps each category to its exit code.
#pragma once

#include <stdexcept>
#include <string>

namespace hcont {

/// Invalid input: malformed curve literal, point on the curve, bad ranges.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A numerical procedure failed: non-convergence, loss of positivity,
/// precision floor violated.
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// File system or stream failure.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace hcont
