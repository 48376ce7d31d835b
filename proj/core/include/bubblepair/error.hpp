#pragma once

#include <stdexcept>
#include <string>

namespace bubblepair {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A parameter block or configuration value violates its constraints.
class InvalidParameters : public Error {
public:
    using Error::Error;
};

/// A function was called outside its domain (e.g. non-positive radius,
/// integration target in the past).
class DomainError : public Error {
public:
    using Error::Error;
};

/// The physical model stopped being meaningful: radius collapse below the
/// floor, a near-singular acceleration system, or step-size underflow.
class ModelBreakdown : public Error {
public:
    using Error::Error;
};

/// The tangent frame lost rank or its norms underflowed.
class NumericalDegeneracy : public Error {
public:
    using Error::Error;
};

/// A spectrum was not converged, so no regime class is assigned.
class ClassificationRefused : public Error {
public:
    using Error::Error;
};

}  // namespace bubblepair
