#pragma once

#include <stdexcept>
#include <string>

namespace sqz {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Malformed configuration or inconsistent inputs. CLI exit code 2.
class ValidationError : public Error {
public:
  explicit ValidationError(const std::string& msg) : Error(msg) {}
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
public:
  explicit DomainError(const std::string& msg) : Error(msg) {}
};

/// Quadrature non-convergence, ill-conditioning, etc. CLI exit code 3.
class NumericalError : public Error {
public:
  explicit NumericalError(const std::string& msg) : Error(msg) {}
};

} // namespace sqz
