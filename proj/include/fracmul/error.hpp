#pragma once

#include <stdexcept>
#include <string>

namespace fracmul {

/// Base class for every failure raised by the toolkit.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A parameter lies outside its documented domain.
class InvalidParameter : public Error {
public:
    using Error::Error;
};

/// A function (usually a multiplier symbol) produced a non-finite value.
class EvaluationError : public Error {
public:
    using Error::Error;
};

/// The grid cannot represent the requested spectral object.
class ResolutionError : public Error {
public:
    using Error::Error;
};

/// An iterative or refined quantity failed to settle.
class ConvergenceError : public Error {
public:
    using Error::Error;
};

}  // namespace fracmul
