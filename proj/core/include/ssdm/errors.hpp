#pragma once

#include <stdexcept>
#include <string>

namespace ssdm {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define SSDM_DEFINE_ERROR(Name)        \
  class Name : public Error {          \
   public:                             \
    using Error::Error;                \
  }

SSDM_DEFINE_ERROR(DimensionMismatch);
SSDM_DEFINE_ERROR(ZeroGradient);
SSDM_DEFINE_ERROR(BadBox);
SSDM_DEFINE_ERROR(NumericalFailure);
SSDM_DEFINE_ERROR(EmptyBundle);
SSDM_DEFINE_ERROR(EmptyLevelSet);
SSDM_DEFINE_ERROR(ModelContractViolation);
SSDM_DEFINE_ERROR(ShapeDegenerate);
SSDM_DEFINE_ERROR(BadInstance);
SSDM_DEFINE_ERROR(ClairvoyantInfeasible);
SSDM_DEFINE_ERROR(BasisDimensionMismatch);
SSDM_DEFINE_ERROR(UnboundedChi);
SSDM_DEFINE_ERROR(SchemaError);
SSDM_DEFINE_ERROR(UnboundedObjective);

#undef SSDM_DEFINE_ERROR

}  // namespace ssdm
