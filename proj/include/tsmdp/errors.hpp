#pragma once

#include <stdexcept>
#include <string>

namespace tsmdp {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// |utility| exceeded the unit bound required of every environment.
struct UtilityBoundError : Error {
  using Error::Error;
};

/// Operation needs more observed records than the history holds.
struct InsufficientDataError : Error {
  using Error::Error;
};

/// A scalar argument fell outside its admissible domain.
struct DomainError : Error {
  using Error::Error;
};

/// Structural parameters make the requested object impossible to build.
struct ParameterError : Error {
  using Error::Error;
};

struct NumericError : Error {
  using Error::Error;
};

struct EstimationError : Error {
  using Error::Error;
};

/// Transition whose deterministic component cannot occur under the model.
struct ImpossibleTransitionError : Error {
  using Error::Error;
};

struct DivergenceError : Error {
  using Error::Error;
};

struct ConfigError : Error {
  using Error::Error;
};

}  // namespace tsmdp
