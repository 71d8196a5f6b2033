#pragma once

#include <stdexcept>
#include <string>

namespace hydrobal {

/// Base for every error raised by the library. The CLI maps the concrete
/// type to an exit code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input data breaks a documented invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Argument outside the domain of a pure function (e.g. discharge beyond capacity).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// The optimization model has no feasible point. `constraint_class` names the
/// group of the first violated constraint found by phase 1.
class InfeasibleError : public Error {
 public:
  InfeasibleError(std::string constraint_class, const std::string& what)
      : Error(what), constraint_class_(std::move(constraint_class)) {}
  const std::string& constraint_class() const noexcept { return constraint_class_; }

 private:
  std::string constraint_class_;
};

class UnboundedError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace hydrobal
