#pragma once

#include <stdexcept>
#include <string>

namespace mskv {

/// Whether a failure comes from bad input or from a numerical routine.
/// The CLI maps these to exit codes 2 and 3.
enum class ErrorKind { Validation, Numerical };

/// Error carrying the originating module and a stable error name
/// (e.g. "NonEvenPotential", "QuadratureFailure").
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string module, std::string name, const std::string& detail)
      : std::runtime_error(module + "::" + name + ": " + detail),
        kind_(kind),
        module_(std::move(module)),
        name_(std::move(name)) {}

  ErrorKind kind() const noexcept { return kind_; }
  const std::string& module() const noexcept { return module_; }
  const std::string& name() const noexcept { return name_; }

 private:
  ErrorKind kind_;
  std::string module_;
  std::string name_;
};

inline Error validation_error(std::string module, std::string name, const std::string& detail) {
  return Error(ErrorKind::Validation, std::move(module), std::move(name), detail);
}

inline Error numerical_error(std::string module, std::string name, const std::string& detail) {
  return Error(ErrorKind::Numerical, std::move(module), std::move(name), detail);
}

}  // namespace mskv
