#pragma once

#include <stdexcept>
#include <string>

namespace ctwindow {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// File missing, unreadable or unwritable.
class IoError : public Error {
public:
    using Error::Error;
};

/// Malformed header, raw size mismatch, unknown element kind.
class FormatError : public Error {
public:
    using Error::Error;
};

/// A precondition on an argument was violated (dims mismatch, bad parameter...).
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// Index outside the valid extent.
class OutOfRange : public Error {
public:
    using Error::Error;
};

/// Statistical test impossible on the given sample (e.g. every paired difference is zero).
class DegenerateSample : public Error {
public:
    using Error::Error;
};

} // namespace ctwindow
