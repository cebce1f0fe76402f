#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mmot {

enum class ErrorCode {
  InvalidArgument,
  InfeasibleDensity,
  ScaleGuard,
  NoConvergence,
  NumericalUnderflow,
  WrongGeometry,
  OutOfDomain,
  WindowTooSmall,
  BadDimension,
  GridTooCoarse,
  ParseError,
  MassMismatch,
  ConfigError,
  IoError,
};

std::string_view to_string(ErrorCode code);

/// Exception carrying a module-qualified error code, e.g. "solvers.ScaleGuard".
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string module, const std::string& message)
      : std::runtime_error(message), code_(code), module_(std::move(module)) {}

  ErrorCode code() const noexcept { return code_; }
  const std::string& module() const noexcept { return module_; }
  std::string qualified_code() const {
    return module_ + "." + std::string(to_string(code_));
  }

 private:
  ErrorCode code_;
  std::string module_;
};

}  // namespace mmot
