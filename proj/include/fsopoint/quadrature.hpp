#pragma once

// Globally adaptive 7-point Gauss / 15-point Kronrod quadrature.
// The interval with the largest error estimate is bisected until the summed
// estimate satisfies max(abs_tol, rel_tol * |I|) or the subdivision budget
// is exhausted.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "fsopoint/errors.hpp"

namespace fsopoint {

struct QuadratureSpec {
  double rel_tol = 1e-10;
  double abs_tol = 1e-13;
  int max_subdivisions = 200;

  void validate() const {
    detail::require_positive(rel_tol, "rel_tol");
    detail::require_non_negative(abs_tol, "abs_tol");
    if (max_subdivisions < 1) {
      throw domain_error("max_subdivisions must be >= 1");
    }
  }
};

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
  int subdivisions = 0;
  bool converged = false;
};

namespace detail {

// Abscissae and weights on [-1, 1] (QUADPACK qk15).
inline constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double a;
  double b;
  double value;
  double error;
  bool operator<(const Panel& o) const { return error < o.error; }
};

template <class F>
Panel gauss_kronrod15(const F& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(center);
  double kronrod = fc * kWgk[7];
  double gauss = fc * kWg[3];
  double abs_sum = std::abs(kronrod);
  std::array<double, 15> fv{};
  fv[7] = fc;
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kXgk[j];
    const double f1 = f(center - dx);
    const double f2 = f(center + dx);
    fv[j] = f1;
    fv[14 - j] = f2;
    kronrod += kWgk[j] * (f1 + f2);
    abs_sum += kWgk[j] * (std::abs(f1) + std::abs(f2));
    if (j % 2 == 1) {
      gauss += kWg[j / 2] * (f1 + f2);
    }
  }
  const double mean = 0.5 * kronrod;
  double asc = kWgk[7] * std::abs(fc - mean);
  for (int j = 0; j < 7; ++j) {
    asc += kWgk[j] * (std::abs(fv[j] - mean) + std::abs(fv[14 - j] - mean));
  }
  const double result = kronrod * half;
  const double resabs = abs_sum * std::abs(half);
  const double resasc = asc * std::abs(half);

  double err = std::abs((kronrod - gauss) * half);
  if (resasc != 0.0 && err != 0.0) {
    err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  }
  constexpr double eps = std::numeric_limits<double>::epsilon();
  constexpr double tiny = std::numeric_limits<double>::min();
  if (resabs > tiny / (50.0 * eps)) {
    err = std::max(err, 50.0 * eps * resabs);
  }
  return {a, b, result, err};
}

}  // namespace detail

/// Integrates f over [a, b]. Never throws on non-convergence; inspect
/// `converged` or use integrate_or_throw.
template <class F>
QuadratureResult integrate(const F& f, double a, double b, const QuadratureSpec& spec = {}) {
  spec.validate();
  QuadratureResult out;
  if (a == b) {
    out.converged = true;
    return out;
  }
  std::vector<detail::Panel> panels;
  panels.reserve(static_cast<std::size_t>(spec.max_subdivisions) + 1);
  const detail::Panel first = detail::gauss_kronrod15(f, a, b);
  panels.push_back(first);
  double total = first.value;
  double total_err = first.error;
  int subdivisions = 0;

  auto done = [&] { return total_err <= std::max(spec.abs_tol, spec.rel_tol * std::abs(total)); };

  while (!done() && subdivisions < spec.max_subdivisions) {
    const detail::Panel worst = panels.front();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) break;  // interval no longer splittable
    std::pop_heap(panels.begin(), panels.end());
    panels.back() = detail::gauss_kronrod15(f, worst.a, mid);
    std::push_heap(panels.begin(), panels.end());
    panels.push_back(detail::gauss_kronrod15(f, mid, worst.b));
    std::push_heap(panels.begin(), panels.end());
    ++subdivisions;
    // Re-summing avoids drift from repeated subtract/add of large panels.
    total = 0.0;
    total_err = 0.0;
    for (const auto& p : panels) {
      total += p.value;
      total_err += p.error;
    }
  }
  out.value = total;
  out.error = total_err;
  out.subdivisions = subdivisions;
  out.converged = done();
  return out;
}

template <class F>
double integrate_or_throw(const F& f, double a, double b, const QuadratureSpec& spec,
                          const char* what = "adaptive quadrature") {
  const QuadratureResult r = integrate(f, a, b, spec);
  if (!r.converged) {
    throw accuracy_error(std::string(what) + " did not converge within " +
                             std::to_string(spec.max_subdivisions) + " subdivisions",
                         r.value, r.error);
  }
  return r.value;
}

}  // namespace fsopoint
