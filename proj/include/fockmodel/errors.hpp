#pragma once

#include <stdexcept>
#include <string>

namespace fockmodel {

enum class ErrorKind {
  Precondition,
  AlphabetMismatch,
  ShapeMismatch,
  NotHermitian,
  NotPSD,
  NotConverged,
  StructureViolation,
  NotCNC,
  NotWandering,
  NotRegular,
  NotInvariant,
  IllConditioned,
  RankUnstable,
  TruncationUnstable,
  NotComparable,
  NotPowerBounded,
  DimensionGuard,
  Parse,
};

const char* to_string(ErrorKind k);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace fockmodel
