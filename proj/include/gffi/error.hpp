#pragma once

#include <stdexcept>
#include <string>

namespace gffi {

enum class ErrorKind {
  InvalidArgument,
  WallViolation,
  InconsistentConfiguration,
  NonConvergence,
  OutOfDomain,
  InvalidPattern,
  Io,
  Schema,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace gffi
