#pragma once

// Exponentially scaled modified Bessel functions e^{-x} I0(x), e^{-x} I1(x)
// for x >= 0. Ascending series below the crossover, Hankel asymptotic
// expansion above it. Neither branch overflows for any finite x.

#include <cmath>
#include <numbers>

namespace fsopoint::special {

namespace detail {

inline constexpr double kBesselCrossover = 25.0;

// e^{-x} * sum_k (x/2)^{2k+nu} / (k! (k+nu)!)
inline double scaled_bessel_series(int nu, double x) {
  const double q = 0.25 * x * x;
  double term = (nu == 0) ? 1.0 : 0.5 * x;
  double sum = term;
  for (int k = 1; k < 500; ++k) {
    term *= q / (static_cast<double>(k) * static_cast<double>(k + nu));
    sum += term;
    if (term < sum * 1e-17) break;
  }
  return sum * std::exp(-x);
}

// e^{-x} I_nu(x) ~ (2 pi x)^{-1/2} sum_k (-1)^k a_k(nu) / x^k,
// a_k = prod_{j=1..k} (4 nu^2 - (2j-1)^2) / (k! 8^k).
inline double scaled_bessel_asymptotic(int nu, double x) {
  const double mu = 4.0 * nu * nu;
  double term = 1.0;
  double sum = 1.0;
  for (int k = 1; k < 60; ++k) {
    const double odd = 2.0 * k - 1.0;
    const double next = -term * (mu - odd * odd) / (8.0 * k * x);
    if (std::abs(next) >= std::abs(term)) break;  // series started diverging
    term = next;
    sum += term;
    if (std::abs(term) < 1e-17 * std::abs(sum)) break;
  }
  return sum / std::sqrt(2.0 * std::numbers::pi * x);
}

}  // namespace detail

/// e^{-|x|} I0(x).
inline double bessel_i0e(double x) {
  x = std::abs(x);
  return x < detail::kBesselCrossover ? detail::scaled_bessel_series(0, x)
                                      : detail::scaled_bessel_asymptotic(0, x);
}

/// e^{-|x|} I1(x); odd in x.
inline double bessel_i1e(double x) {
  const double ax = std::abs(x);
  const double v = ax < detail::kBesselCrossover ? detail::scaled_bessel_series(1, ax)
                                                 : detail::scaled_bessel_asymptotic(1, ax);
  return x < 0.0 ? -v : v;
}

/// e^{-x} (I0(x) - 1) for x >= 0, without cancellation at small x.
inline double bessel_i0m1e(double x) {
  x = std::abs(x);
  if (x >= detail::kBesselCrossover) return bessel_i0e(x) - std::exp(-x);
  const double q = 0.25 * x * x;
  double term = q;
  double sum = q;
  for (int k = 2; k < 500; ++k) {
    term *= q / (static_cast<double>(k) * static_cast<double>(k));
    sum += term;
    if (term < sum * 1e-17) break;
  }
  return sum * std::exp(-x);
}

}  // namespace fsopoint::special
