#pragma once

#include <stdexcept>
#include <string>

namespace salsa {

/// Base class for every error raised by this library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Precondition violation: a caller passed arguments outside a contract.
struct InvalidArgument : Error {
    using Error::Error;
};

/// Malformed or inconsistent input data (parse failures, duplicates, NaNs).
struct DataError : Error {
    using Error::Error;
};

/// Invalid or contradictory run configuration; names the offending field.
struct ConfigError : Error {
    using Error::Error;
};

/// SPD factorization failed even after the jitter ladder was exhausted.
struct ConditioningError : Error {
    explicit ConditioningError(const std::string& msg, int level = -1)
        : Error(msg), level(level) {}
    int level;  // hierarchy level (0-based) if known, -1 otherwise
};

/// Smoothness estimation cannot proceed (too few levels or usable pairs).
struct EstimationError : Error {
    using Error::Error;
};

}  // namespace salsa
