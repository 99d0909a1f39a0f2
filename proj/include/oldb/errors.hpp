#pragma once

#include <stdexcept>
#include <string>

namespace oldb {

struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct RangeError : std::out_of_range {
  using std::out_of_range::out_of_range;
};

// Numerical failures that are not the user's fault (non-finite input, CFL, horizon).
struct RuntimeFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct StepSizeError : RuntimeFailure {
  using RuntimeFailure::RuntimeFailure;
};

struct HorizonTooLarge : RuntimeFailure {
  using RuntimeFailure::RuntimeFailure;
};

}  // namespace oldb
