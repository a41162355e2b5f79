#pragma once

#include <stdexcept>
#include <string>

namespace qnpg {

// Operand shapes do not agree.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Invalid configuration value (bad discount, negative variance, ...).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A non-finite number appeared where the computation requires finite values.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised by solve_spd when the Cholesky factorization breaks down.
class NotPositiveDefinite : public std::runtime_error {
 public:
  NotPositiveDefinite(const std::string& what, double smallest_eigenvalue)
      : std::runtime_error(what), smallest_eigenvalue_(smallest_eigenvalue) {}

  double smallest_eigenvalue() const noexcept { return smallest_eigenvalue_; }

 private:
  double smallest_eigenvalue_;
};

// Scalar LQR gain outside the closed-loop stability domain.
class UnstableParameter : public std::domain_error {
 public:
  UnstableParameter(const std::string& what, double theta, double denominator)
      : std::domain_error(what), theta_(theta), denominator_(denominator) {}

  double theta() const noexcept { return theta_; }
  double denominator() const noexcept { return denominator_; }

 private:
  double theta_;
  double denominator_;
};

}  // namespace qnpg
