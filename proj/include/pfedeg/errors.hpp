#pragma once

#include <stdexcept>
#include <string>

namespace pfedeg {

/// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Malformed caller input: shape mismatches, bad vocabularies, invalid arguments.
struct InvalidInputError : Error {
    using Error::Error;
};

/// Bad configuration value (out-of-range hyperparameter, unknown key, ...).
struct ConfigError : Error {
    using Error::Error;
};

/// Dataset or checkpoint could not be read; message names file (and line where known).
struct LoadError : Error {
    using Error::Error;
};

/// Non-finite values where finite ones are required.
struct NumericError : Error {
    using Error::Error;
};

/// Evaluation cannot proceed (e.g. query tail missing from the candidate set).
struct EvalError : Error {
    using Error::Error;
};

}  // namespace pfedeg
