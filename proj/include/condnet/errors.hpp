#pragma once

#include <stdexcept>
#include <string>

namespace condnet {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid arguments or configuration (bad width, bad fraction, ...).
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Input file is missing, unreadable, or does not follow the CSV schema.
class SchemaError : public Error {
public:
    using Error::Error;
};

/// A single data row failed validation. Carries the 1-based file line number.
class RowError : public SchemaError {
public:
    RowError(std::size_t line, const std::string& what)
        : SchemaError("line " + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// Dataset content makes the requested operation meaningless (empty, N < 2, ...).
class DataError : public Error {
public:
    using Error::Error;
};

/// Model file is unreadable or has an unsupported format version.
class ModelFormatError : public Error {
public:
    using Error::Error;
};

/// Non-finite values appeared during forward/backward evaluation or training.
class NumericError : public Error {
public:
    using Error::Error;
};

}  // namespace condnet
