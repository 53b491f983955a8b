#pragma once

#include <stdexcept>
#include <string>

namespace resmix {

/// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Caller passed an invalid argument, option or configuration value.
struct ArgumentError : Error {
    using Error::Error;
};

/// Bad configuration (parameter files, manifests, stability limits).
struct ConfigError : ArgumentError {
    using ArgumentError::ArgumentError;
};

/// Input data is malformed or unusable (parse failures, bad grids).
struct DataError : Error {
    using Error::Error;
};

/// Input is structurally valid but degenerate for the requested analysis
/// (constant series, zero variance, empty windows).
struct DegenerateInputError : DataError {
    using DataError::DataError;
};

/// An estimator failed to produce a usable number (no scaling region,
/// undefined entropy, singular regression).
struct NumericalError : Error {
    using Error::Error;
};

/// A trend ledger or feature vector is missing entries a classifier needs.
struct IncompleteInputError : ArgumentError {
    using ArgumentError::ArgumentError;
};

}  // namespace resmix
