// fmm: exception hierarchy shared by all components.
#pragma once

#include <stdexcept>
#include <string>

namespace fmm {

// Base for everything this library throws on purpose.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed textual input (scheme files, program listings, numbers).
class ParseError : public Error {
public:
    using Error::Error;
};

// A value defined twice, or used before its definition.
class SsaError : public Error {
public:
    using Error::Error;
};

// Operand kinds do not fit the instruction (e.g. product of two products).
class KindError : public Error {
public:
    using Error::Error;
};

// A program has no induced bilinear scheme.
class ExtractError : public Error {
public:
    using Error::Error;
};

// Matrix shapes do not match the requested operation.
class ShapeError : public Error {
public:
    using Error::Error;
};

// Arithmetic left the representable range of a checked ring.
class OverflowError : public Error {
public:
    using Error::Error;
};

// Invalid argument to an operation (non-prime modulus, bad config, ...).
class ArgError : public Error {
public:
    using Error::Error;
};

}  // namespace fmm
