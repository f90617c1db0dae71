#pragma once

#include <stdexcept>
#include <string>

namespace cperc {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

#define CPERC_ERROR(Name)                                   \
  struct Name : Error {                                     \
    explicit Name(const std::string& m = #Name) : Error(m) {} \
  }

CPERC_ERROR(InvalidDomain);
CPERC_ERROR(InvalidInput);
CPERC_ERROR(InvalidEdge);
CPERC_ERROR(FaceNotWhite);
CPERC_ERROR(FaceNotMonochromatic);
CPERC_ERROR(InconsistentContours);
CPERC_ERROR(CrossingContours);
CPERC_ERROR(DomainTooLarge);
CPERC_ERROR(DomainMismatch);
CPERC_ERROR(NotAPath);
CPERC_ERROR(TorusUnsupported);
CPERC_ERROR(OddBoundaryParity);
CPERC_ERROR(BoxTooSmall);
CPERC_ERROR(PreconditionViolated);
CPERC_ERROR(NonPositiveCoupling);
CPERC_ERROR(WeightOutOfRange);
CPERC_ERROR(NoSolution);
CPERC_ERROR(PcOutOfRange);
CPERC_ERROR(NotExtendable);
CPERC_ERROR(ParseError);
CPERC_ERROR(OutputExists);

#undef CPERC_ERROR

}  // namespace cperc
