#pragma once

#include <stdexcept>
#include <string>

namespace nhgeo {

/// Base for failures caused by the numerics rather than by bad input.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Right-eigenvector matrix is (close to) singular: an exceptional point.
class DefectiveMatrix : public NumericalError {
 public:
  explicit DefectiveMatrix(const std::string& what, double condition = 0.0,
                           double k = 0.0, bool has_k = false)
      : NumericalError(what), condition_(condition), k_(k), has_k_(has_k) {}

  double condition() const { return condition_; }
  bool has_momentum() const { return has_k_; }
  double momentum() const { return k_; }

 private:
  double condition_;
  double k_;
  bool has_k_;
};

class DegenerateSpectrum : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// The Resta phase expectation is too small for a meaningful position.
class DelocalizedState : public NumericalError {
 public:
  DelocalizedState(const std::string& what, double magnitude)
      : NumericalError(what), magnitude_(magnitude) {}
  double magnitude() const { return magnitude_; }

 private:
  double magnitude_;
};

class PTBroken : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace nhgeo
