#pragma once

#include <stdexcept>
#include <string>

namespace coopgame {

// Base of every error the library throws. `kind()` is a stable machine-readable
// tag used by the CLI when it emits error JSON.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual const char* kind() const noexcept { return "error"; }
};

#define COOPGAME_ERROR(Name, tag)                          \
  class Name : public Error {                              \
   public:                                                 \
    using Error::Error;                                    \
    const char* kind() const noexcept override { return tag; } \
  };

COOPGAME_ERROR(RangeError, "range")
COOPGAME_ERROR(ValidationError, "validation")
COOPGAME_ERROR(SchemaError, "schema")
COOPGAME_ERROR(SingularSystemError, "singular_system")
COOPGAME_ERROR(NumericError, "numeric")
COOPGAME_ERROR(InsufficientSamplesError, "insufficient_samples")
COOPGAME_ERROR(NoOverlapError, "no_overlap")
COOPGAME_ERROR(ZeroSupportError, "zero_support")
COOPGAME_ERROR(TransportError, "transport")

#undef COOPGAME_ERROR

}  // namespace coopgame
