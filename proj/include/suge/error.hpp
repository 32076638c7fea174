#pragma once

#include <stdexcept>
#include <string>

namespace suge {

/// Base for all errors raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Non-finite or wrongly sized input to a numeric routine.
class InvalidInputError : public Error {
public:
    using Error::Error;
};

/// Invalid configuration value. `field()` names the offending key.
class ConfigError : public Error {
public:
    ConfigError(std::string field, const std::string& message)
        : Error(field + ": " + message), field_(std::move(field)) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

/// Malformed dataset/checkpoint file. `line()` is 1-based, 0 when not line specific.
class ParseError : public Error {
public:
    ParseError(std::size_t line, const std::string& message)
        : Error(line > 0 ? "line " + std::to_string(line) + ": " + message : message),
          line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// Linear solve failed (singular system).
class NumericalError : public Error {
public:
    using Error::Error;
};

/// Mixture fit impossible: fewer than two distinct values.
class DegenerateFitError : public Error {
public:
    using Error::Error;
};

}  // namespace suge
