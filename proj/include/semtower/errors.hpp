#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace semtower {

// Base class for all library errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Two vectors (or a vector and a store) disagree on dimensionality.
class DimensionMismatchError : public Error {
public:
    DimensionMismatchError(std::size_t expected, std::size_t got)
        : Error("dimension mismatch: expected " + std::to_string(expected) +
                ", got " + std::to_string(got)),
          expected(expected),
          got(got) {}

    std::size_t expected;
    std::size_t got;
};

// A remote backend could not be reached or answered with a failure.
class TransportError : public Error {
public:
    TransportError(std::string endpoint_, std::string cause_)
        : Error("transport error contacting " + endpoint_ + ": " + cause_),
          endpoint(std::move(endpoint_)),
          cause(std::move(cause_)) {}

    std::string endpoint;
    std::string cause;
};

// Malformed input data; context names the file/line or offending fragment.
class ParseError : public Error {
public:
    explicit ParseError(const std::string& what) : Error(what) {}
};

// Filesystem failure; message carries the path.
class IoError : public Error {
public:
    explicit IoError(const std::string& what) : Error(what) {}
};

}  // namespace semtower
