#include <catch_amalgamated.hpp>

#include <cmath>
#include <numeric>
#include <vector>

#include "fsopoint/errors.hpp"
#include "fsopoint/models.hpp"
#include "fsopoint/stats.hpp"

using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;
using namespace fsopoint;

TEST_CASE("rayleigh pdf integrates to one") {
  auto f = [](double r) { return rayleigh_pdf(r, 0.7); };
  CHECK_THAT(integrate(f, 0.0, 20.0).value, WithinRel(1.0, 1e-12));
  CHECK_THROWS_AS(rayleigh_pdf(1.0, 0.0), fsopoint::domain_error);
}

TEST_CASE("rayleigh sample moments") {
  const double s = 0.5;
  const std::size_t n = 400000;
  const auto r = rayleigh_sample(s, 42, n);
  double m1 = 0.0, m2 = 0.0;
  for (double v : r) {
    m1 += v;
    m2 += v * v;
  }
  m1 /= n;
  m2 /= n;
  // E r = s sqrt(pi/2), Var r = (4 - pi)/2 s^2; E r^2 = 2 s^2, Var r^2 = 4 s^4
  const double mean = s * std::sqrt(M_PI / 2.0);
  const double se1 = std::sqrt((4.0 - M_PI) / 2.0 * s * s / n);
  const double se2 = std::sqrt(4.0 * s * s * s * s / n);
  CHECK(std::abs(m1 - mean) < 5.0 * se1);
  CHECK(std::abs(m2 - 2.0 * s * s) < 5.0 * se2);
}

TEST_CASE("sampling is independent of the thread count") {
  const std::size_t n = 300001;  // several chunks plus a ragged tail
  const auto one = rayleigh_sample(1.0, 7, n, 1);
  CHECK(one == rayleigh_sample(1.0, 7, n, 3));
  CHECK(one == rayleigh_sample(1.0, 7, n, 8));
  CHECK(one != rayleigh_sample(1.0, 8, n, 1));
  const auto m = make_model(ModelKind::farid, 2.0, 1.0);
  CHECK(monte_carlo_hp_samples(m, 1.0, n, 3, 1) == monte_carlo_hp_samples(m, 1.0, n, 3, 5));
}

TEST_CASE("exp-family density is a power law and uniform at gamma^2 = 1") {
  const ExpFamilyHpLaw law{0.5, 2.0, 0.5};
  CHECK_THAT(law.gamma2(), WithinRel(1.0, 1e-15));
  for (double h : {0.01, 0.2, 0.49}) CHECK_THAT(law.pdf(h), WithinRel(2.0, 1e-13));
  CHECK(law.pdf(0.6) == 0.0);
  const double g2 = 1.0 / (2.0 * 0.3 * 0.3 * 2.0);
  CHECK_THAT(hp_pdf_exp_family(0.1, 0.5, 2.0, 0.3),
             WithinRel(g2 / std::pow(0.5, g2) * std::pow(0.1, g2 - 1.0), 1e-13));
}

TEST_CASE("every law carries unit mass") {
  for (double s : {0.05, 0.5, 3.0}) {
    CAPTURE(s);
    CHECK_THAT(total_mass(ExpFamilyHpLaw{0.3, 1.7, s}), WithinAbs(1.0, 1e-9));
    CHECK_THAT(total_mass(PointApproxHpLaw{1.0, s, 15.9577}), WithinAbs(1.0, 1e-9));
    CHECK_THAT(total_mass(SecondReducedHpLaw{1.0, s, 13.0}), WithinAbs(1.0, 1e-9));
  }
}

TEST_CASE("densities are consistent with the push-forward change of variables") {
  // f_h(h) |dh/dr| = f_r(r) at h = model(r)
  const double s = 0.8, ra = 1.0;
  const auto pa = point_approx_params(0.2, ra);
  const auto lam = second_reduced_vasylyev_params(0.2, ra).lambda;
  for (double r : {0.5, 0.95, 1.1}) {
    const double d = 1e-6;
    const double h1 = point_approx_eval(pa, r);
    const double dh1 = (point_approx_eval(pa, r + d) - point_approx_eval(pa, r - d)) / (2 * d);
    CHECK_THAT(hp_pdf_point_approx(h1, ra, s, pa.alpha) * std::abs(dh1), WithinRel(rayleigh_pdf(r, s), 1e-6));
    const double h2 = second_reduced_eval(lam, ra, r);
    const double dh2 = (second_reduced_eval(lam, ra, r + d) - second_reduced_eval(lam, ra, r - d)) / (2 * d);
    CHECK_THAT(hp_pdf_second_reduced(h2, ra, s, lam) * std::abs(dh2), WithinRel(rayleigh_pdf(r, s), 1e-6));
  }
}

TEST_CASE("tabulated cdf is monotone and ends at one") {
  const auto cdf = TabulatedCdf::build(SecondReducedHpLaw{1.0, 0.5, 13.0}, 2000);
  CHECK(cdf.size() == 2000);
  CHECK_THAT(cdf.mass(), WithinAbs(1.0, 1e-9));
  double prev = 0.0;
  for (int i = 1; i < 100; ++i) {
    const double f = cdf(i / 100.0);
    CHECK(f >= prev);
    prev = f;
  }
  CHECK(cdf(0.0) == 0.0);
  CHECK_THAT(cdf(1.0), WithinAbs(1.0, 1e-9));
}

TEST_CASE("KS distance shrinks like 1/sqrt(n)") {
  const PointApproxHpLaw law{1.0, 0.5, 15.9577};
  const auto cdf = TabulatedCdf::build(law);
  const PointApproxParams p{law.alpha, 1, law.ra};
  auto model = [&p](double r) { return point_approx_eval(p, r); };
  auto mean_ks = [&](std::size_t n) {
    double acc = 0.0;
    for (std::uint64_t seed = 1; seed <= 8; ++seed) {
      const auto h = monte_carlo_hp_samples(model, law.sigma_s, n, seed);
      acc += ks_distance(h, cdf);
    }
    return acc / 8.0;
  };
  const double small = mean_ks(4000), large = mean_ks(64000);
  // E[D_n] ~ 0.87 / sqrt(n); a 16x larger sample should cut it about 4x
  CHECK(small / large > 2.5);
  CHECK(small / large < 6.5);
  CHECK(large < 2.0 / std::sqrt(64000.0));
}

TEST_CASE("histogram binning and normalisation") {
  CHECK(hist_bin(0.0, 10) == 0);
  CHECK(hist_bin(1.0, 10) == 9);
  CHECK(hist_bin(0.55, 10) == 5);
  const auto m = make_model(ModelKind::modified_intensity_uniform, 2.0, 1.0);
  const auto hist = monte_carlo_hp_hist(m, 1.0, 50000, 20, 11, 2);
  CHECK(std::accumulate(hist.counts.begin(), hist.counts.end(), std::uint64_t{0}) == 50000);
  double integral = 0.0;
  for (std::size_t b = 0; b < 20; ++b) integral += hist.density(b) * 0.05;
  CHECK_THAT(integral, WithinRel(1.0, 1e-12));
  CHECK_THROWS_AS(monte_carlo_hp_hist(m, 1.0, 0, 20, 1), fsopoint::domain_error);
}

TEST_CASE("invalid inputs") {
  CHECK_THROWS_AS(JitterSpec(0.0), fsopoint::domain_error);
  CHECK_THROWS_AS(rayleigh_sample(-1.0, 1, 10), fsopoint::domain_error);
  CHECK_THROWS_AS(ks_distance(std::vector<double>{}, TabulatedCdf::build(ExpFamilyHpLaw{0.5, 2.0, 0.5}, 100)),
                  fsopoint::domain_error);
}

TEST_CASE("KS reduces to the textbook statistic without ties and handles tied blocks") {
  // c1 = 1, gamma^2 = 1: uniform on (0, 1]
  const auto cdf = TabulatedCdf::build(ExpFamilyHpLaw{1.0, 2.0, 0.5});
  const std::vector<double> spread = {0.25, 0.5, 0.75};
  CHECK_THAT(ks_distance(spread, cdf), WithinAbs(0.25, 1e-6));
  const std::vector<double> ones(10, 1.0);
  CHECK_THAT(ks_distance(ones, cdf), WithinAbs(1.0, 1e-6));
  const std::vector<double> halves = {0.5, 0.5};
  CHECK_THAT(ks_distance(halves, cdf), WithinAbs(0.5, 1e-6));
  const std::vector<double> outside = {1.5};
  CHECK_THROWS_AS(ks_distance(outside, cdf), fsopoint::domain_error);
}
