#pragma once

#include <stdexcept>
#include <string>

namespace labelkit {

// Base class for every error raised by the library. Subclasses exist so
// callers can map failures to exit codes or handle specific cases; the
// message always names the offending entity (row id, column, line number).
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// --- data / validation errors -------------------------------------------

class IoError : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    ParseError(const std::string& path, std::size_t line, const std::string& what)
        : Error(path + ":" + std::to_string(line) + ": " + what), line_(line) {}
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

class DuplicateIdError : public Error {
public:
    using Error::Error;
};

class BadVoteValueError : public Error {
public:
    using Error::Error;
};

class ShapeMismatchError : public Error {
public:
    using Error::Error;
};

class InvalidPatternError : public Error {
public:
    using Error::Error;
};

class AlignmentError : public Error {
public:
    using Error::Error;
};

class InsufficientDataError : public Error {
public:
    using Error::Error;
};

class MissingParamsError : public Error {
public:
    using Error::Error;
};

// --- numeric errors -------------------------------------------------------

class DegenerateMatrixError : public Error {
public:
    using Error::Error;
};

class ZeroBaselineError : public Error {
public:
    using Error::Error;
};

class IndexOutOfRangeError : public Error {
public:
    using Error::Error;
};

// --- usage errors ----------------------------------------------------------

class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace labelkit
