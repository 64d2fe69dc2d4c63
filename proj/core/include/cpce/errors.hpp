#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace cpce {

/// Broad failure class; the CLI maps each class onto an exit code.
enum class ErrorKind {
  domain,         ///< argument outside the mathematical domain (p outside (0,1), ...)
  parameter,      ///< bad caller-supplied size or option
  validation,     ///< malformed input data (scenario file, correlation matrix, artifact)
  numerical,      ///< factorization or solver breakdown
  resource,       ///< node budget or similar hard limit exceeded
  evaluation,     ///< integrand produced a non-finite value
  configuration,  ///< inconsistent configuration (empty monomial set, ...)
  internal,
};

const char* to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class DomainError : public Error {
 public:
  explicit DomainError(const std::string& what) : Error(ErrorKind::domain, what) {}
};

class ParameterError : public Error {
 public:
  explicit ParameterError(const std::string& what) : Error(ErrorKind::parameter, what) {}
};

class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& what) : Error(ErrorKind::validation, what) {}
};

class NumericalError : public Error {
 public:
  explicit NumericalError(const std::string& what) : Error(ErrorKind::numerical, what) {}
};

/// Correlation matrix rejected by the Cholesky factorization.
class NotPositiveDefiniteError : public NumericalError {
 public:
  NotPositiveDefiniteError(const std::string& what, double min_eigenvalue)
      : NumericalError(what), min_eigenvalue_(min_eigenvalue) {}
  double min_eigenvalue() const noexcept { return min_eigenvalue_; }

 private:
  double min_eigenvalue_;
};

/// Gram matrix Cholesky broke down at `pivot`; that monomial is (nearly) dependent
/// on the ones before it.
class IllConditionedBasisError : public NumericalError {
 public:
  IllConditionedBasisError(const std::string& what, std::size_t pivot)
      : NumericalError(what), pivot_(pivot) {}
  std::size_t pivot() const noexcept { return pivot_; }

 private:
  std::size_t pivot_;
};

class ResourceError : public Error {
 public:
  explicit ResourceError(const std::string& what) : Error(ErrorKind::resource, what) {}
};

/// Carries the latent-space node at which the integrand blew up.
class EvaluationError : public Error {
 public:
  EvaluationError(const std::string& what, std::vector<double> node)
      : Error(ErrorKind::evaluation, what), node_(std::move(node)) {}
  const std::vector<double>& node() const noexcept { return node_; }

 private:
  std::vector<double> node_;
};

class ConfigurationError : public Error {
 public:
  explicit ConfigurationError(const std::string& what) : Error(ErrorKind::configuration, what) {}
};

}  // namespace cpce
