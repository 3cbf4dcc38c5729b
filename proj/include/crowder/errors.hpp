#pragma once

#include <stdexcept>
#include <string>

namespace crowder {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input file (missing column, duplicate id, bad JSON line).
class SchemaError : public Error {
public:
    using Error::Error;
};

/// Invalid parameters (k < 2, threshold outside [0,1], r > pool size).
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Incomplete or inconsistent answers.
class ValidationError : public Error {
public:
    using Error::Error;
};

}  // namespace crowder
