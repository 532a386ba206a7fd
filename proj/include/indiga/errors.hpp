#pragma once

#include <stdexcept>
#include <string>

namespace indiga {

// Base of the whole taxonomy; every condition the tool can report flows
// through one of the subclasses below so sessions can capture it by kind.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
  virtual const char* kind() const { return "Error"; }
};

#define INDIGA_DEFINE_ERROR(NAME)                                  \
  class NAME : public Error {                                      \
   public:                                                         \
    explicit NAME(const std::string& what) : Error(what) {}        \
    const char* kind() const override { return #NAME; }            \
  }

INDIGA_DEFINE_ERROR(UniverseError);        // operand variable universes differ
INDIGA_DEFINE_ERROR(PresentationError);    // malformed ring/ideal presentation
INDIGA_DEFINE_ERROR(CompatibilityError);   // element reps disagree across levels
INDIGA_DEFINE_ERROR(ResourceExceeded);     // Groebner or iteration cap hit
INDIGA_DEFINE_ERROR(IllDefinedDerivation); // images do not kill the level ideal
INDIGA_DEFINE_ERROR(NotLocallyNilpotent);  // delta fails the nilpotency bound
INDIGA_DEFINE_ERROR(RequiresCertificate);  // exponential asked of an uncertified derivation
INDIGA_DEFINE_ERROR(PreconditionError);    // audited precondition failed, message carries witness
INDIGA_DEFINE_ERROR(ZeroRing);             // operation undefined on the zero ring
INDIGA_DEFINE_ERROR(ParseError);           // session text rejected, message carries location
INDIGA_DEFINE_ERROR(NameError);            // unbound name in a session script

#undef INDIGA_DEFINE_ERROR

}  // namespace indiga
