#pragma once

#include <stdexcept>
#include <string>

namespace fsopoint {

// Invalid argument for an operation (non-positive length, value outside support, ...).
class domain_error : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

// Adaptive quadrature ran out of subdivisions before meeting its tolerance.
class accuracy_error : public std::runtime_error {
public:
  accuracy_error(const std::string& what, double value, double error_estimate)
      : std::runtime_error(what), value_(value), error_estimate_(error_estimate) {}

  double value() const noexcept { return value_; }
  double error_estimate() const noexcept { return error_estimate_; }

private:
  double value_;
  double error_estimate_;
};

// Linearized model: the chosen r0 gives an accumulated power outside (0, c1).
class calibration_error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class optimization_error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class fit_error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline void require_positive(double v, const char* name) {
  if (!(v > 0.0)) {
    throw domain_error(std::string(name) + " must be strictly positive");
  }
}

inline void require_non_negative(double v, const char* name) {
  if (!(v >= 0.0)) {
    throw domain_error(std::string(name) + " must be non-negative");
  }
}

}  // namespace detail
}  // namespace fsopoint
