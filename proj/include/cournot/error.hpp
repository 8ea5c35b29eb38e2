#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace cournot {

enum class ErrorCode {
  InvalidArgument,
  DuplicateEdge,
  IsolatedVertex,
  NonDecreasingPrice,
  NonConvexCost,
  ShapeMismatch,
  MethodInapplicable,
  NoFeasiblePoint,
  NotSeparable,
  Infeasible,
  TooLarge,
  OutOfRange,
  ParseError,
};

std::string_view to_string(ErrorCode code);

// Single exception type for every failure the library reports; callers
// branch on code() rather than on a class hierarchy.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace cournot
