#pragma once

#include <stdexcept>
#include <string>

namespace margsdp {

enum class ErrorKind {
  InvalidInput,
  InvalidConfig,
  InvalidState,
  Numerical,
  BrokenSymmetry,
  Divergence,
  Checkpoint,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace margsdp
