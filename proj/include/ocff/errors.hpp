#pragma once

#include <stdexcept>

namespace ocff {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Dimension mismatch between operands; the message names both shapes.
struct ShapeError : Error {
    using Error::Error;
};

/// Bad or inconsistent user configuration.
struct ConfigError : Error {
    using Error::Error;
};

/// Malformed input files or degenerate data (empty batch, single-class
/// labels, all-zero calibration scores).
struct DataError : Error {
    using Error::Error;
};

/// Non-finite values where finite ones are required (diverged training).
struct NumericError : Error {
    using Error::Error;
};

} // namespace ocff
