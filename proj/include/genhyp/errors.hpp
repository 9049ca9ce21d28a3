#pragma once

#include <stdexcept>
#include <string>

namespace genhyp {

// Error with a stable machine-readable code ("area/what") plus a human message.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& message)
      : std::runtime_error(message), code_(std::move(code)) {}
  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

// Bad configuration or arguments (CLI exit code 2).
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Problem-domain failure during a run (CLI exit code 1).
class DomainError : public Error {
 public:
  using Error::Error;
};

}  // namespace genhyp
