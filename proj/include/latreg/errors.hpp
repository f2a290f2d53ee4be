#pragma once

#include <stdexcept>
#include <string>

namespace latreg {

struct DimensionTooLarge : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct SingularBasis : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct NotSignVector : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct QNotPowerOfTwo : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct NotInSnk : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct BadShape : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct SearchSpaceTooLarge : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct ZeroMatrix : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct PreconditionViolated : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct ConfigInvalid : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct HashMismatch : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct SchemaVersionUnsupported : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace latreg
