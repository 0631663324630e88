#pragma once

#include <stdexcept>
#include <string>

namespace polysart {

enum class ErrorKind {
  Parse,
  EmptyInput,
  NegativeWeight,
  DuplicateEnergy,
  NonPositive,
  ZeroWeights,
  OutOfRange,
  DimensionMismatch,
  InvalidArgument,
  Io,
};

/// Library-wide exception. `kind()` lets callers and tests tell failure modes
/// apart without matching message text.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace polysart
