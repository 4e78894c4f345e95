#pragma once

// Exact pointing-loss transmission efficiency h_p(r) of a Gaussian beam on a
// circular aperture. Three independent routes:
//   - radial Weber-type integral (1-D adaptive quadrature, scaled Bessel I0)
//   - Cartesian double integral over the disk (nested adaptive quadrature)
//   - Marcum Q1 (Poisson series, no quadrature, no Bessel functions)

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "fsopoint/errors.hpp"
#include "fsopoint/quadrature.hpp"
#include "fsopoint/special.hpp"

namespace fsopoint {

namespace detail {

inline void check_hp_args(double r, double wz, double ra) {
  require_non_negative(r, "r");
  require_positive(wz, "wz");
  require_positive(ra, "ra");
}

inline double clamp_unit(double v) { return std::clamp(v, 0.0, 1.0); }

// Integrates f over [a, b], splitting at the interior breakpoints so that
// narrow peaks are never straddled by the first Kronrod panel.
template <class F>
double integrate_pieces(const F& f, double a, double b, std::vector<double> breaks, const QuadratureSpec& spec,
                        const char* what) {
  breaks.erase(std::remove_if(breaks.begin(), breaks.end(), [&](double x) { return !(x > a && x < b); }),
               breaks.end());
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
  double lo = a;
  double sum = 0.0;
  breaks.push_back(b);
  for (double hi : breaks) {
    sum += integrate_or_throw(f, lo, hi, spec, what);
    lo = hi;
  }
  return sum;
}

}  // namespace detail

/// h_p at zero displacement: 1 - exp(-2 ra^2 / wz^2).
inline double hp_at_zero(double wz, double ra) {
  detail::require_positive(wz, "wz");
  detail::require_positive(ra, "ra");
  return -std::expm1(-2.0 * ra * ra / (wz * wz));
}

/// Radial form: (4/wz^2) exp(-2r^2/wz^2) int_0^ra rho exp(-2 rho^2/wz^2) I0(4 r rho / wz^2) d rho,
/// with the exponentials folded into exp(-2(r-rho)^2/wz^2) * e^{-x} I0(x).
inline double hp_exact_radial(double r, double wz, double ra, const QuadratureSpec& spec = {}) {
  detail::check_hp_args(r, wz, ra);
  spec.validate();
  if (r == 0.0) return hp_at_zero(wz, ra);
  const double inv_w2 = 1.0 / (wz * wz);
  auto integrand = [=](double rho) {
    const double d = r - rho;
    return 4.0 * inv_w2 * rho * std::exp(-2.0 * d * d * inv_w2) * special::bessel_i0e(4.0 * r * rho * inv_w2);
  };
  const double v = detail::integrate_pieces(integrand, 0.0, ra, {r - 4.0 * wz, r, r + 4.0 * wz}, spec,
                                            "hp_exact_radial");
  return detail::clamp_unit(v);
}

/// Cartesian double integral over the aperture disk. The outer variable is
/// x = ra sin(theta), which removes the square-root endpoint behaviour of the
/// chord half-length; the inner y-integral is itself adaptive.
inline double hp_exact_cartesian(double r, double wz, double ra, const QuadratureSpec& spec = {}) {
  detail::check_hp_args(r, wz, ra);
  spec.validate();
  const double inv_w2 = 1.0 / (wz * wz);
  const double norm = 2.0 / (std::numbers::pi * wz * wz);
  QuadratureSpec inner_spec = spec;
  inner_spec.rel_tol = spec.rel_tol * 0.1;
  inner_spec.abs_tol = spec.abs_tol * 0.1;

  auto outer = [&](double theta) {
    const double x = ra * std::sin(theta);
    const double chord = ra * std::cos(theta);
    const double dx = x - r;
    const double ex = std::exp(-2.0 * dx * dx * inv_w2);
    if (ex == 0.0 || chord <= 0.0) return 0.0;
    auto inner = [&](double y) { return std::exp(-2.0 * y * y * inv_w2); };
    const double iy = 2.0 * detail::integrate_pieces(inner, 0.0, chord, {4.0 * wz}, inner_spec,
                                                     "hp_exact_cartesian (inner)");
    return norm * ex * iy * chord;  // dx = ra cos(theta) d theta
  };
  const double half_pi = 0.5 * std::numbers::pi;
  std::vector<double> breaks;
  for (double xb : {r - 4.0 * wz, r, r + 4.0 * wz}) {
    if (xb > -ra && xb < ra) breaks.push_back(std::asin(xb / ra));
  }
  const double v = detail::integrate_pieces(outer, -half_pi, half_pi, breaks, spec, "hp_exact_cartesian");
  return detail::clamp_unit(v);
}

namespace detail {

struct MarcumPair {
  double q;   // Q1(a, b)
  double pc;  // 1 - Q1(a, b), summed directly
};

// Q1(a, b) = P(N <= M) with N ~ Poisson(b^2/2), M ~ Poisson(a^2/2) independent.
inline MarcumPair marcum_poisson(double a, double b) {
  const double mu = 0.5 * a * a;
  const double nu = 0.5 * b * b;
  auto span = [](double lambda) { return 12.0 * std::sqrt(lambda) + 40.0; };
  const long m_lo = std::max(0L, static_cast<long>(std::floor(mu - span(mu))));
  const long m_hi = static_cast<long>(std::ceil(mu + span(mu)));
  const long n_hi = std::max(m_hi, static_cast<long>(std::ceil(nu + span(nu)))) + 1;

  auto log_pmf = [](long k, double lambda) {
    return static_cast<double>(k) * std::log(lambda) - lambda - std::lgamma(static_cast<double>(k) + 1.0);
  };

  std::vector<double> pn(static_cast<std::size_t>(n_hi) + 1);
  for (long n = 0; n <= n_hi; ++n) pn[n] = std::exp(log_pmf(n, nu));
  // cdf[m] = P(N <= m), sf[m] = P(N > m), both accumulated from their small end.
  std::vector<double> cdf(pn.size()), sf(pn.size());
  double acc = 0.0;
  for (std::size_t n = 0; n < pn.size(); ++n) {
    acc += pn[n];
    cdf[n] = acc;
  }
  acc = 0.0;
  for (std::size_t n = pn.size(); n-- > 0;) {
    sf[n] = acc;
    acc += pn[n];
  }

  MarcumPair out{0.0, 0.0};
  for (long m = m_lo; m <= m_hi; ++m) {
    const double pm = std::exp(log_pmf(m, mu));
    out.q += pm * cdf[m];
    out.pc += pm * sf[m];
  }
  out.q = clamp_unit(out.q);
  out.pc = clamp_unit(out.pc);
  return out;
}

}  // namespace detail

/// First-order Marcum Q function Q1(a, b) = int_b^inf t exp(-(t^2 + a^2)/2) I0(a t) dt.
inline double marcum_q1(double a, double b) {
  detail::require_non_negative(a, "a");
  detail::require_non_negative(b, "b");
  if (b == 0.0) return 1.0;
  if (a == 0.0) return std::exp(-0.5 * b * b);
  const auto m = detail::marcum_poisson(a, b);
  return m.pc < 0.5 ? 1.0 - m.pc : m.q;  // the smaller of the pair carries full relative precision
}

/// h_p(r) = 1 - Q1(2r/wz, 2ra/wz); the complement is summed directly so
/// small efficiencies keep full relative precision.
inline double hp_exact_marcum(double r, double wz, double ra) {
  detail::check_hp_args(r, wz, ra);
  if (r == 0.0) return hp_at_zero(wz, ra);
  return detail::marcum_poisson(2.0 * r / wz, 2.0 * ra / wz).pc;
}

}  // namespace fsopoint
