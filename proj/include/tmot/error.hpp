#pragma once

#include <stdexcept>
#include <string>

namespace tmot {

/// Root of every exception thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid parameters or mismatched shapes supplied by the caller.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Malformed or inconsistent input data (files, records, annotations).
class DataError : public Error {
public:
    using Error::Error;
};

/// File could not be opened, read, written or decoded.
class IoError : public DataError {
public:
    using DataError::DataError;
};

/// Non-finite coordinates or a zero-area box handed to the filter.
class GeometryError : public Error {
public:
    using Error::Error;
};

/// Frames presented to a tracker out of order.
class SequenceError : public Error {
public:
    using Error::Error;
};

}  // namespace tmot
