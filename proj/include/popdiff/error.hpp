#pragma once

#include <stdexcept>
#include <string>

namespace popdiff {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define POPDIFF_DEFINE_ERROR(Name)        \
  class Name : public Error {             \
   public:                                \
    using Error::Error;                   \
  }

POPDIFF_DEFINE_ERROR(InvalidModulus);
POPDIFF_DEFINE_ERROR(InvalidArgument);
POPDIFF_DEFINE_ERROR(DimensionMismatch);
POPDIFF_DEFINE_ERROR(SingularError);
POPDIFF_DEFINE_ERROR(BothZero);
POPDIFF_DEFINE_ERROR(NotContained);
POPDIFF_DEFINE_ERROR(NotSymmetric);
POPDIFF_DEFINE_ERROR(NotAutomorphism);
POPDIFF_DEFINE_ERROR(NotMeasurable);
POPDIFF_DEFINE_ERROR(DependentDirections);
POPDIFF_DEFINE_ERROR(NonConvergent);
POPDIFF_DEFINE_ERROR(NoPrimeInWindow);

/// An enumeration would exceed the configured guard limit.
POPDIFF_DEFINE_ERROR(TooLarge);

/// Grid-function file errors.
POPDIFF_DEFINE_ERROR(FormatError);
class BadMagic : public FormatError {
 public:
  using FormatError::FormatError;
};
class VersionMismatch : public FormatError {
 public:
  using FormatError::FormatError;
};
class CorruptLength : public FormatError {
 public:
  using FormatError::FormatError;
};

#undef POPDIFF_DEFINE_ERROR

}  // namespace popdiff
