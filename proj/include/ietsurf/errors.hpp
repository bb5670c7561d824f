#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace ietsurf {

// Every failure mode carries a stable machine-readable code so the CLI can
// emit it verbatim; see Error::code().
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& what)
      : std::runtime_error(what), code_(std::move(code)) {}
  const std::string& code() const { return code_; }

 private:
  std::string code_;
};

#define IETSURF_ERROR(NAME)                                   \
  class NAME : public Error {                                 \
   public:                                                    \
    explicit NAME(const std::string& what) : Error(#NAME, what) {} \
  }

IETSURF_ERROR(NotIrreducible);
IETSURF_ERROR(OutOfDomain);
IETSURF_ERROR(DimensionMismatch);
IETSURF_ERROR(InvalidLengths);
IETSURF_ERROR(SuspensionInvalid);
IETSURF_ERROR(NotUnimodular);
IETSURF_ERROR(DegenerateTransversal);
IETSURF_ERROR(LengthCollapse);
IETSURF_ERROR(CollisionObstruction);
IETSURF_ERROR(NotInNullSpace);
IETSURF_ERROR(NotPositivePair);
IETSURF_ERROR(NonpositiveParameter);
IETSURF_ERROR(ParseError);
IETSURF_ERROR(InternalError);

#undef IETSURF_ERROR

}  // namespace ietsurf
