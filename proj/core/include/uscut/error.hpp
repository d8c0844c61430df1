#pragma once

#include <stdexcept>
#include <string>

namespace uscut {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed or unsupported file content, unreadable paths.
class IoError : public Error {
public:
    using Error::Error;
};

/// A precondition on an argument does not hold (bad dimensions, empty masks, ...).
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// Helper-seed constraints that no finite cut can satisfy.
class InfeasibleConstraints : public Error {
public:
    using Error::Error;
};

} // namespace uscut
