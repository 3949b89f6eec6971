#pragma once

#include <stdexcept>
#include <string>

namespace entangle {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define ENTANGLE_ERROR(Name)             \
  class Name : public Error {            \
   public:                               \
    using Error::Error;                  \
  }

ENTANGLE_ERROR(UnsupportedDimension);
ENTANGLE_ERROR(NotHermitian);
ENTANGLE_ERROR(ShapeError);
ENTANGLE_ERROR(InvalidArgument);
// Dominant transfer-matrix eigenvalue is not separated from the rest.
ENTANGLE_ERROR(DegenerateTransfer);
ENTANGLE_ERROR(GaugeSingular);
ENTANGLE_ERROR(NumericalBreakdown);
ENTANGLE_ERROR(PatternTooLarge);
ENTANGLE_ERROR(TooLarge);
ENTANGLE_ERROR(FormatError);
ENTANGLE_ERROR(ConfigError);

#undef ENTANGLE_ERROR

}  // namespace entangle
