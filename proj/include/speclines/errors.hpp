#pragma once

#include <stdexcept>
#include <string>

namespace speclines {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Failures of a numerical routine (singularity, divergence, blowup, ...).
/// The CLI maps these to exit code 3.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Invalid or inconsistent configuration. The CLI maps these to exit code 2.
class ConfigError : public Error {
 public:
  using Error::Error;
};

#define SPECLINES_NUMERICAL_ERROR(Name)  \
  class Name : public NumericalError {   \
   public:                               \
    using NumericalError::NumericalError; \
  }

SPECLINES_NUMERICAL_ERROR(SingularMatrix);
SPECLINES_NUMERICAL_ERROR(NonConvergence);
SPECLINES_NUMERICAL_ERROR(FrequencyOffGrid);
SPECLINES_NUMERICAL_ERROR(DegenerateSequence);
SPECLINES_NUMERICAL_ERROR(DegenerateSignal);
SPECLINES_NUMERICAL_ERROR(StateBlowup);
SPECLINES_NUMERICAL_ERROR(ResonantFrequency);
SPECLINES_NUMERICAL_ERROR(DuplicateFrequency);
SPECLINES_NUMERICAL_ERROR(RankDeficient);
SPECLINES_NUMERICAL_ERROR(DimensionMismatch);
SPECLINES_NUMERICAL_ERROR(NonPositiveDefinite);
SPECLINES_NUMERICAL_ERROR(NotStabilizable);
SPECLINES_NUMERICAL_ERROR(NoStabilizingController);
SPECLINES_NUMERICAL_ERROR(EmptyInput);

#undef SPECLINES_NUMERICAL_ERROR

}  // namespace speclines
