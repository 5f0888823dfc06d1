#pragma once

#include <stdexcept>
#include <string>

namespace oppscreen {

enum class ErrorKind {
  InvalidArgument,
  Io,
  Parse,
  Data,
  Training,
  Version,
};

// Single exception type for the core; the C API maps kind() to a status code.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace oppscreen
