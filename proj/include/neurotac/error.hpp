#pragma once

#include <stdexcept>
#include <string>

namespace neurotac {

// Base for every error raised by the library. The CLI maps the concrete
// subclasses onto process exit codes.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed file contents (bad magic, truncated records, unparsable JSON).
class FormatError : public Error {
public:
    using Error::Error;
};

// Well-formed input that violates a domain invariant.
class ValidationError : public Error {
public:
    using Error::Error;
};

// Out-of-range numeric parameter (window widths, time constants, ratios).
class ParameterError : public Error {
public:
    using Error::Error;
};

// Incompatible operands, e.g. mixing encodings or metric/encoding mismatch.
class MismatchError : public Error {
public:
    using Error::Error;
};

// Caller broke a documented precondition (e.g. unsorted events).
class PreconditionError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

// An internal contract between pipeline stages was broken.
class InternalError : public Error {
public:
    using Error::Error;
};

}  // namespace neurotac
