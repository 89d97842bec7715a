#pragma once

#include <stdexcept>
#include <string>

namespace ftu {

/// Base of every error raised by the library. `exit_code()` is the process
/// status the CLI maps the error to.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
    virtual int exit_code() const noexcept { return 1; }
};

/// Malformed or out-of-range serialized data (RLE, ProbMap, PSET, CSV rows).
class FormatError : public Error {
public:
    using Error::Error;
    int exit_code() const noexcept override { return 3; }
};

/// Precondition violated by the caller (dimension mismatch, bad factor, ...).
class ContractError : public Error {
public:
    using Error::Error;
    int exit_code() const noexcept override { return 3; }
};

class ConfigError : public Error {
public:
    using Error::Error;
    int exit_code() const noexcept override { return 2; }
};

/// Input table (manifest, folds, submission) lacks required columns.
class SchemaError : public Error {
public:
    using Error::Error;
    int exit_code() const noexcept override { return 2; }
};

class DataError : public Error {
public:
    using Error::Error;
    int exit_code() const noexcept override { return 3; }
};

/// External predictor misbehaved or reported an ERR1 frame.
class PredictorError : public Error {
public:
    using Error::Error;
    int exit_code() const noexcept override { return 4; }
};

} // namespace ftu
