#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace schwarz {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed expression text. `position()` is the 0-based byte offset.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t pos)
        : Error(what + " at position " + std::to_string(pos)), pos_(pos) {}
    std::size_t position() const noexcept { return pos_; }

private:
    std::size_t pos_;
};

/// Division by zero, ln of a non-positive value, tan at a pole, unbound variable.
class DomainError : public Error {
public:
    using Error::Error;
};

/// |u'| below the singularity threshold.
class SingularJetError : public Error {
public:
    using Error::Error;
};

/// Requested time is a pole of a closed-form solution.
class SingularTimeError : public Error {
public:
    using Error::Error;
};

/// Series with different base point or order were combined.
class SeriesMismatchError : public Error {
public:
    using Error::Error;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

}  // namespace schwarz
