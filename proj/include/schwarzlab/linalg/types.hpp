#pragma once

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace schwarzlab {

using Scalar = std::complex<double>;
using Vector = std::vector<Scalar>;
using Index = std::size_t;

inline constexpr Scalar kI{0.0, 1.0};

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

// Raised when a pivot drops below tolerance; `pivot` is the column index.
class SingularMatrixError : public Error {
 public:
  SingularMatrixError(const std::string& what, Index pivot) : Error(what), pivot(pivot) {}
  Index pivot;
};

// Invalid configuration or operator combination. The message names the
// requirement that was violated.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// A structural assumption of the method does not hold on this instance
// (for example a singular augmented subdomain operator).
class AssumptionError : public Error {
 public:
  using Error::Error;
};

}  // namespace schwarzlab
