#pragma once

#include <stdexcept>
#include <string>

namespace riccap {

// Malformed or inconsistent model data (dimension mismatch, broken invariant).
class ModelError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A numerical precondition failed at run time (singular denominator, non-PSD
// covariance, unstable matrix where stability is required).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised when a matrix required to be exponentially stable is not.
class NotStableError : public NumericalError {
 public:
  NotStableError(const std::string& what, double offending_modulus)
      : NumericalError(what), offending_modulus_(offending_modulus) {}
  double offending_modulus() const { return offending_modulus_; }

 private:
  double offending_modulus_;
};

}  // namespace riccap
