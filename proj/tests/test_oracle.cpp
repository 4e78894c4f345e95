#include <catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "fsopoint/errors.hpp"
#include "fsopoint/oracle.hpp"

using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;
using namespace fsopoint;

namespace {

struct Ref {
  double r, wz, ra, h;
};

// 30-digit quadrature of the radial form
const std::vector<Ref> kReference = {
    {0.5, 2, 1, 0.35728576972745623084},
    {1, 2, 1, 0.26712019620317978175},
    {3, 2, 1, 0.010829449821547850976},
    {0, 0.3, 1, 0.99999999977663685638},
    {1, 0.1, 1, 0.49002332185903000451},
    {0.9, 0.1, 1, 0.97578909909120753561},
    {1.2, 0.1, 1, 0.000028755374094367233837},
    {2, 0.5, 1, 0.000021836715476439267033},
    {10, 6, 1, 0.00024253610940746613928},
};

}  // namespace

TEST_CASE("all three routes reproduce high-precision references") {
  for (const auto& c : kReference) {
    CAPTURE(c.r, c.wz);
    CHECK_THAT(hp_exact_radial(c.r, c.wz, c.ra), WithinRel(c.h, 1e-9));
    CHECK_THAT(hp_exact_cartesian(c.r, c.wz, c.ra), WithinRel(c.h, 1e-8));
    CHECK_THAT(hp_exact_marcum(c.r, c.wz, c.ra), WithinRel(c.h, 1e-11));
  }
}

TEST_CASE("marcum Q1 reference values and special cases") {
  CHECK_THAT(marcum_q1(1, 1), WithinRel(0.73287980379682021825, 1e-13));
  CHECK_THAT(marcum_q1(2, 3), WithinRel(0.21436208816264945697, 1e-13));
  CHECK_THAT(marcum_q1(5, 4), WithinRel(0.86704979507792559765, 1e-13));
  CHECK_THAT(marcum_q1(0.5, 10), WithinRel(4.8513264394524679515e-21, 1e-10));
  CHECK_THAT(marcum_q1(10, 2), WithinRel(0.99999999999999972866, 2e-16));
  CHECK(marcum_q1(3.0, 0.0) == 1.0);
  CHECK(marcum_q1(0.0, 2.0) == std::exp(-2.0));
}

TEST_CASE("cross-route agreement on a property grid") {
  for (int i = 0; i < 10; ++i) {
    const double r = 5.0 * i / 9.0;
    for (int j = 0; j < 10; ++j) {
      const double wz = 0.05 + (6.0 - 0.05) * j / 9.0;
      CAPTURE(r, wz);
      const double a = hp_exact_radial(r, wz, 1.0);
      const double b = hp_exact_cartesian(r, wz, 1.0);
      const double c = hp_exact_marcum(r, wz, 1.0);
      CHECK_THAT(a, WithinAbs(c, 1e-10));
      CHECK_THAT(b, WithinAbs(c, 1e-9));
    }
  }
}

TEST_CASE("value at zero displacement is closed form") {
  for (double wz : {0.05, 0.3, 1.0, 2.0, 6.0}) {
    CHECK_THAT(hp_exact_radial(0.0, wz, 1.0), WithinRel(1.0 - std::exp(-2.0 / (wz * wz)), 1e-14));
    CHECK_THAT(hp_exact_cartesian(0.0, wz, 1.0), WithinRel(hp_at_zero(wz, 1.0), 1e-9));
  }
}

TEST_CASE("efficiency is bounded, maximal at r = 0 and decreasing in r") {
  for (double wz : {0.1, 0.7, 3.0}) {
    double prev = hp_exact_marcum(0.0, wz, 1.0);
    for (int i = 1; i <= 40; ++i) {
      const double h = hp_exact_marcum(0.1 * i, wz, 1.0);
      CHECK(h >= 0.0);
      CHECK(h <= prev + 1e-14);  // summation noise near h = 1
      prev = h;
    }
  }
}

TEST_CASE("scale invariance: h depends on r/ra and wz/ra only") {
  for (double s : {1e-3, 0.05, 7.0}) {
    CHECK_THAT(hp_exact_radial(0.8 * s, 1.5 * s, s), WithinRel(hp_exact_radial(0.8, 1.5, 1.0), 1e-10));
    CHECK_THAT(hp_exact_marcum(0.8 * s, 1.5 * s, s), WithinRel(hp_exact_marcum(0.8, 1.5, 1.0), 1e-12));
  }
}

TEST_CASE("far tail keeps relative precision") {
  // the complement route must not lose the tiny value to cancellation
  const double h = hp_exact_marcum(3.0, 0.5, 1.0);
  CHECK(h > 0.0);
  CHECK_THAT(hp_exact_radial(3.0, 0.5, 1.0), WithinRel(h, 1e-8));
}

TEST_CASE("argument validation") {
  CHECK_THROWS_AS(hp_exact_radial(-1.0, 1.0, 1.0), fsopoint::domain_error);
  CHECK_THROWS_AS(hp_exact_cartesian(1.0, 0.0, 1.0), fsopoint::domain_error);
  CHECK_THROWS_AS(hp_exact_marcum(1.0, 1.0, 0.0), fsopoint::domain_error);
  CHECK_THROWS_AS(marcum_q1(-1.0, 1.0), fsopoint::domain_error);
}
