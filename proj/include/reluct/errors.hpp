#pragma once

#include <stdexcept>
#include <string>

namespace reluct {

/// Raised when a configuration file cannot be parsed or fails validation.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Raised when a numerical procedure fails (non-convergence, step underflow,
/// flux-domain breach, eigen-solver failure).
struct NumericError : std::runtime_error {
    explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Raised on file-system failures (unreadable input, unwritable output).
struct IoError : std::runtime_error {
    explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace reluct
