#pragma once

#include <stdexcept>
#include <string>

namespace rcukf {

/// Invalid configuration, dimension mismatch, or malformed input.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Numerical failure: non-PSD covariance, singular solve, divergence.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Filesystem or parse failure; message carries the offending path.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace rcukf
