#pragma once

#include <stdexcept>
#include <string>

namespace ectrl {

// Base class for all library errors. Callers that do not care about the
// exact failure mode catch this one.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define ECTRL_DEFINE_ERROR(Name)            \
  class Name : public Error {               \
   public:                                  \
    using Error::Error;                     \
  }

// matkit
ECTRL_DEFINE_ERROR(DimensionMismatch);
ECTRL_DEFINE_ERROR(UnstableMatrix);
ECTRL_DEFINE_ERROR(NonConvergence);
ECTRL_DEFINE_ERROR(RankDeficient);
ECTRL_DEFINE_ERROR(NotPositiveDefinite);

// plantsim / h2syn
ECTRL_DEFINE_ERROR(UnstableClosedLoop);
ECTRL_DEFINE_ERROR(NotControllable);
ECTRL_DEFINE_ERROR(BarrierInitFailure);
ECTRL_DEFINE_ERROR(UnstableResult);

// lsattack
ECTRL_DEFINE_ERROR(WindowOutOfRange);

// seclevel
ECTRL_DEFINE_ERROR(InvalidSampleSize);
ECTRL_DEFINE_ERROR(CountOverflow);
ECTRL_DEFINE_ERROR(NonPositiveLog);

// cryptoloop
ECTRL_DEFINE_ERROR(PrimeSearchFailure);
ECTRL_DEFINE_ERROR(InvalidPlaintext);
ECTRL_DEFINE_ERROR(EpochMismatch);
ECTRL_DEFINE_ERROR(EncodingOverflow);

#undef ECTRL_DEFINE_ERROR

}  // namespace ectrl
