#pragma once

#include <stdexcept>
#include <string>

namespace fadekit {

/// Base class of every exception raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An argument lies outside the domain of the requested function.
class DomainError : public Error {
public:
    using Error::Error;
};

/// The result (or an intermediate quantity) is not representable in a double.
class OverflowError : public Error {
public:
    using Error::Error;
};

/// An iterative or adaptive procedure did not reach its tolerance.
class ConvergenceError : public Error {
public:
    using Error::Error;
};

/// An integrand returned NaN or infinity at an interior node.
class NonFiniteError : public Error {
public:
    using Error::Error;
};

/// No vertical line separates the two pole families of a Mellin-Barnes integrand.
class PoleSeparationError : public Error {
public:
    using Error::Error;
};

}  // namespace fadekit
