#pragma once

#include <stdexcept>

namespace fss {

// Base type for all library errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DimensionMismatch : Error { using Error::Error; };
struct PointOutsideRect : Error { using Error::Error; };
struct OutOfDomain : Error { using Error::Error; };
struct UnsupportedGeometry : Error { using Error::Error; };
struct ParseError : Error { using Error::Error; };
struct ZeroTotalMass : Error { using Error::Error; };
struct ZeroFreeSpace : Error { using Error::Error; };
struct InsufficientSamples : Error { using Error::Error; };
struct BudgetExhausted : Error { using Error::Error; };
struct InvariantViolation : Error { using Error::Error; };

}  // namespace fss
