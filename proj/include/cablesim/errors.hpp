#pragma once

#include <stdexcept>
#include <string>

namespace cablesim {

struct UnreachableError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct JointLimitError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct OverstretchError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CableLostError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct GripError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace cablesim
