#pragma once

#include <stdexcept>
#include <string>

namespace lifecast {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad user-supplied configuration (paths, parameter ranges, file formats).
class ConfigError : public Error {
public:
    using Error::Error;
};

/// A cascade cannot be analyzed (zero span, too few intervals, ...).
/// Corpus loops record these and skip the cascade.
class DegenerateCascadeError : public Error {
public:
    using Error::Error;
};

/// A series or sample is too short for the requested operation.
class TooShortError : public Error {
public:
    using Error::Error;
};

/// Threshold calibration cannot proceed (empty pool, negative observations).
class CalibrationError : public Error {
public:
    using Error::Error;
};

/// Rank-deficient regression design.
class CollinearityError : public Error {
public:
    using Error::Error;
};

/// Singular matrix passed to a dense solve.
class SingularMatrixError : public Error {
public:
    using Error::Error;
};

/// An iterative routine ran out of iterations; carries the last iterate value.
class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& what, double last)
        : Error(what), last_value(last) {}
    double last_value;
};

/// Infeasible synthetic-generator specification.
class SynthSpecError : public Error {
public:
    using Error::Error;
};

/// A pipeline stage input artifact is missing; message names the file.
class MissingArtifactError : public Error {
public:
    using Error::Error;
};

}  // namespace lifecast
