#pragma once

#include <stdexcept>
#include <string>

namespace weibayes {

/// Malformed or out-of-domain user input (bad file row, nonpositive time, r > n, ...).
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The hyperparameter rule breaks w(beta) > 1/beta, so `a` cannot be set from
/// the anticipated reliable life.
class ConstraintViolation : public std::domain_error {
 public:
  ConstraintViolation(const std::string& what, double violating_beta)
      : std::domain_error(what), violating_beta_(violating_beta) {}

  double violating_beta() const noexcept { return violating_beta_; }

 private:
  double violating_beta_;
};

/// The censored likelihood has no interior maximum (r < 2 or all failures tied).
class NoFiniteMle : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

}  // namespace weibayes
