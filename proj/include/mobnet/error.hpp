#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mobnet {

/// Invalid configuration or a violated operation precondition.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Input data that cannot be used (bad format, inconsistent tables, undefined metric).
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Stream could not be opened or read.
class IoError : public DataError {
public:
    using DataError::DataError;
};

/// Header or file layout does not match the expected format.
class FormatError : public DataError {
public:
    using DataError::DataError;
};

/// An iterative solver stopped without meeting its tolerance.
class SolverError : public std::runtime_error {
public:
    SolverError(const std::string &what, std::size_t iterations, double residual)
        : std::runtime_error(what), iterations_(iterations), residual_(residual) {}

    std::size_t iterations() const noexcept { return iterations_; }
    double residual() const noexcept { return residual_; }

private:
    std::size_t iterations_;
    double residual_;
};

} // namespace mobnet
