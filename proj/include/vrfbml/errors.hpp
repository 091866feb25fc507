#ifndef VRFBML_ERRORS_HPP
#define VRFBML_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace vrfbml {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Invalid configuration (bad config file, bad CLI usage, bad parameter block).
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Parameter or profile invariant violated.
class ValidationError : public ConfigError {
public:
    using ConfigError::ConfigError;
};

/// Simulation produced an unusable result or was asked for one.
class SimulationError : public Error {
public:
    using Error::Error;
};

/// Resistance calibration could not bracket or reach the target mean.
class CalibrationError : public SimulationError {
public:
    using SimulationError::SimulationError;
};

/// Mathematical precondition violated (log domain, zero denominator, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

/// Anything wrong with a dataset, model file, or report input.
class DataError : public Error {
public:
    using Error::Error;
};

/// Malformed row or token; message carries the line number.
class ParseError : public DataError {
public:
    using DataError::DataError;
};

/// File does not follow the expected schema (header, columns, version).
class SchemaError : public DataError {
public:
    using DataError::DataError;
};

/// A parsed value is outside its allowed domain (non-finite, for example).
class ValueError : public DataError {
public:
    using DataError::DataError;
};

/// Filesystem failure while reading or writing an artifact.
class IoError : public DataError {
public:
    using DataError::DataError;
};

/// Model training could not proceed (degenerate input, bad hyperparameters).
class TrainingError : public Error {
public:
    using Error::Error;
};

} // namespace vrfbml

#endif // VRFBML_ERRORS_HPP
