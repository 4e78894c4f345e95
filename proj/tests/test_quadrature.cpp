#include <catch_amalgamated.hpp>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <numbers>

#include "fsopoint/errors.hpp"
#include "fsopoint/quadrature.hpp"

using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;
using fsopoint::QuadratureSpec;

TEST_CASE("low-degree polynomials need no subdivision") {
  auto f = [](double x) { return std::pow(x, 12) - 3.0 * x * x + 1.0; };
  const auto res = fsopoint::integrate(f, -1.0, 1.0);
  CHECK_THAT(res.value, WithinRel(2.0 / 13.0, 1e-14));
  CHECK(res.converged);
  CHECK(res.subdivisions == 0);
  // degree 22 is within the Kronrod rule, though the Gauss estimate still splits
  auto g = [](double x) { return std::pow(x, 22); };
  CHECK_THAT(fsopoint::integrate(g, -1.0, 1.0).value, WithinRel(2.0 / 23.0, 1e-14));
}

TEST_CASE("agrees with boost gauss_kronrod on smooth and peaked integrands") {
  using boost::math::quadrature::gauss_kronrod;
  auto smooth = [](double x) { return std::exp(-x) * std::cos(3.0 * x); };
  auto peaked = [](double x) { return 1.0 / (1e-4 + (x - 0.3) * (x - 0.3)); };
  auto sqrt_end = [](double x) { return std::sqrt(x); };
  CHECK_THAT(fsopoint::integrate(smooth, 0.0, 10.0).value,
             WithinRel(gauss_kronrod<double, 15>::integrate(smooth, 0.0, 10.0, 15, 1e-13), 1e-11));
  CHECK_THAT(fsopoint::integrate(peaked, 0.0, 1.0).value,
             WithinRel(gauss_kronrod<double, 15>::integrate(peaked, 0.0, 1.0, 20, 1e-12), 1e-9));
  CHECK_THAT(fsopoint::integrate(sqrt_end, 0.0, 1.0).value, WithinRel(2.0 / 3.0, 1e-10));
}

TEST_CASE("reversed and empty intervals") {
  auto f = [](double x) { return x * x; };
  CHECK_THAT(fsopoint::integrate(f, 1.0, 0.0).value, WithinRel(-1.0 / 3.0, 1e-14));
  CHECK(fsopoint::integrate(f, 2.0, 2.0).value == 0.0);
}

TEST_CASE("error estimate bounds the true error") {
  auto f = [](double x) { return std::sin(50.0 * x) * std::exp(x); };
  const double exact = (std::exp(1.0) * (std::sin(50.0) - 50.0 * std::cos(50.0)) + 50.0) / 2501.0;
  const auto res = fsopoint::integrate(f, 0.0, 1.0, QuadratureSpec{1e-8, 0.0, 200});
  CHECK(std::abs(res.value - exact) <= res.error);
}

TEST_CASE("budget exhaustion is reported, and integrate_or_throw raises") {
  auto nasty = [](double x) { return std::sin(1.0 / x); };
  const QuadratureSpec tight{1e-14, 0.0, 5};
  const auto res = fsopoint::integrate(nasty, 1e-6, 1.0, tight);
  CHECK_FALSE(res.converged);
  CHECK_THROWS_AS(fsopoint::integrate_or_throw(nasty, 1e-6, 1.0, tight, "nasty"), fsopoint::accuracy_error);
  try {
    fsopoint::integrate_or_throw(nasty, 1e-6, 1.0, tight, "nasty");
  } catch (const fsopoint::accuracy_error& e) {
    CHECK(e.error_estimate() > 0.0);
    CHECK(std::isfinite(e.value()));
  }
}

TEST_CASE("invalid tolerances are rejected") {
  auto f = [](double x) { return x; };
  CHECK_THROWS_AS(fsopoint::integrate(f, 0.0, 1.0, QuadratureSpec{0.0, 0.0, 10}), fsopoint::domain_error);
  CHECK_THROWS_AS(fsopoint::integrate(f, 0.0, 1.0, QuadratureSpec{1e-8, 0.0, 0}), fsopoint::domain_error);
}

TEST_CASE("gaussian normalisation") {
  auto g = [](double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi); };
  CHECK_THAT(fsopoint::integrate(g, -12.0, 12.0).value, WithinAbs(1.0, 1e-12));
}
