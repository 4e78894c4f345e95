#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "fsopoint/geometry.hpp"
#include "fsopoint/quadrature.hpp"

using Catch::Matchers::WithinRel;
using namespace fsopoint;

TEST_CASE("beam radius in vacuum follows the diffraction law") {
  const double w0 = 0.01, lambda = 1550e-9, z = 1000.0;
  const double zr = std::numbers::pi * w0 * w0 / lambda;
  CHECK_THAT(beam_radius_at(w0, lambda, z), WithinRel(w0 * std::sqrt(1.0 + (z / zr) * (z / zr)), 1e-14));
  CHECK(beam_radius_at(w0, lambda, 0.0) == w0);
}

TEST_CASE("turbulence widens the beam and stronger turbulence widens it more") {
  const double w0 = 0.01, lambda = 1550e-9, z = 2000.0;
  const double vac = beam_radius_at(w0, lambda, z);
  const double weak = beam_radius_at(w0, lambda, z, coherence_length_spherical(1e-16, lambda, z));
  const double strong = beam_radius_at(w0, lambda, z, coherence_length_spherical(1e-13, lambda, z));
  CHECK(vac < weak);
  CHECK(weak < strong);
}

TEST_CASE("coherence length scaling") {
  const double a = coherence_length_spherical(1e-14, 1550e-9, 1000.0);
  const double b = coherence_length_spherical(1e-14, 1550e-9, 2000.0);
  CHECK_THAT(a / b, WithinRel(std::pow(2.0, 0.6), 1e-13));
  const double k = 2.0 * std::numbers::pi / 1550e-9;
  CHECK_THAT(a, WithinRel(std::pow(0.55 * 1e-14 * k * k * 1000.0, -0.6), 1e-14));
}

TEST_CASE("beam intensity integrates to one over the plane") {
  const double wz = 0.7;
  auto f = [wz](double rho) { return 2.0 * std::numbers::pi * rho * beam_intensity(rho, wz); };
  CHECK_THAT(integrate(f, 0.0, 20.0 * wz).value, WithinRel(1.0, 1e-12));
}

TEST_CASE("geometry constructors validate and normalise") {
  CHECK_THROWS_AS(BeamGeometry::from_beam_radius(0.0, 1.0), fsopoint::domain_error);
  CHECK_THROWS_AS(BeamGeometry::from_beam_radius(1.0, -1.0), fsopoint::domain_error);
  CHECK_THROWS_AS(beam_radius_at(0.01, 1550e-9, -1.0), fsopoint::domain_error);
  CHECK_THROWS_AS(NormalizedCase(0.0), fsopoint::domain_error);

  const auto g = NormalizedCase(4.0, 0.05).geometry();
  CHECK_THAT(g.wz, WithinRel(0.2, 1e-15));
  CHECK_THAT(g.wz_over_ra(), WithinRel(4.0, 1e-15));

  const auto t = BeamGeometry::from_transmitter(0.01, 1550e-9, 1000.0, 1e-14, 0.05);
  REQUIRE(t.transmitter);
  CHECK(t.wz > beam_radius_at(0.01, 1550e-9, 1000.0));
}
