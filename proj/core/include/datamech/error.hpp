#pragma once

#include <stdexcept>
#include <string>

namespace datamech {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid argument or violated precondition (empty input, NaN, k out of range).
class ArgumentError : public Error {
public:
    using Error::Error;
};

/// Input does not match the expected feature schema (missing column, length mismatch).
class SchemaError : public Error {
public:
    using Error::Error;
};

/// Input file is syntactically malformed (bad CSV/XML/JSON).
class ParseError : public Error {
public:
    using Error::Error;
};

/// Data is readable but semantically unusable (empty dataset, version mismatch,
/// degenerate contingency table).
class DataError : public Error {
public:
    using Error::Error;
};

/// Filesystem failure.
class IoError : public Error {
public:
    using Error::Error;
};

} // namespace datamech
