#pragma once

#include <stdexcept>
#include <string>

namespace planesym {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class UnsupportedGroupError : public Error {
public:
    using Error::Error;
};

/// Raised when the amplitude map does not show enough lattice peaks to index.
class InsufficientPeriodicityError : public Error {
public:
    using Error::Error;
};

class DegenerateLatticeError : public Error {
public:
    using Error::Error;
};

/// Raised by the climb test when the less symmetric model has a zero residual.
class DegenerateBaselineError : public Error {
public:
    using Error::Error;
};

class InvalidArgumentError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line)
        : Error(what + " (line " + std::to_string(line) + ")"), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

}  // namespace planesym
