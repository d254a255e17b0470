#pragma once

#include <stdexcept>
#include <string>

namespace magnet {

/// Base class for all errors raised by the toolkit.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Factorization failed even after the jitter policy was exhausted.
class NotPositiveDefinite : public Error {
public:
    using Error::Error;
};

/// Numeric rank below the matrix dimension.
class SingularMatrix : public Error {
public:
    using Error::Error;
};

/// Sensor and target coincide (zero displacement).
class DegenerateGeometry : public Error {
public:
    using Error::Error;
};

/// Field magnitude is exactly zero, so the norm gradient is undefined.
class ZeroField : public Error {
public:
    using Error::Error;
};

class InvalidGeometry : public Error {
public:
    using Error::Error;
};

class InvalidConfig : public Error {
public:
    using Error::Error;
};

class DimensionMismatch : public Error {
public:
    using Error::Error;
};

}  // namespace magnet
