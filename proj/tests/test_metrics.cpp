#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <vector>

#include "fsopoint/errors.hpp"
#include "fsopoint/metrics.hpp"

using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;
using namespace fsopoint;

TEST_CASE("default grid follows the beam regime") {
  const auto wide = default_grid(4.0, 1.0);
  CHECK(wide.r_max == 12.0);
  CHECK(wide.count == 1000);
  const auto narrow = default_grid(0.2, 1.0);
  CHECK(narrow.r_max == 2.0);
  CHECK(default_grid(4.0, 1.0, 500, 2.0).r_max == 8.0);
  const auto pts = wide.points();
  CHECK(pts.front() == 0.0);
  CHECK(pts.back() == 12.0);
  CHECK(pts.size() == 1000);
  CHECK_THROWS_AS((EvalGrid{1.0, 1.0, 10}.validate()), fsopoint::domain_error);
  CHECK_THROWS_AS((EvalGrid{0.0, 1.0, 1}.validate()), fsopoint::domain_error);
}

TEST_CASE("nmse of the exact curve against itself is zero; scaled curve is closed form") {
  const auto grid = default_grid(2.0, 1.0, 200);
  auto exact = [](double r) { return hp_exact_marcum(r, 2.0, 1.0); };
  CHECK_THAT(nmse(exact, 2.0, 1.0, grid).nmse, WithinAbs(0.0, 1e-18));
  auto scaled = [&](double r) { return 1.1 * exact(r); };
  CHECK_THAT(nmse(scaled, 2.0, 1.0, grid).nmse, WithinRel(0.01, 1e-8));
  auto zero = [](double) { return 0.0; };
  CHECK_THAT(nmse(zero, 2.0, 1.0, grid).nmse, WithinRel(1.0, 1e-14));
}

TEST_CASE("optimize_r0 returns a local minimum of the calibration objective") {
  const auto oracle = sample_oracle(2.0, 1.0, default_grid(2.0, 1.0));
  const auto opt = optimize_r0(oracle, 4);
  CHECK_THAT(opt.r0_star, WithinRel(4.05, 0.01));
  CHECK(opt.nmse == linearized_nmse(oracle, 4, opt.r0_star));
  for (double f : {0.99, 1.01}) CHECK(linearized_nmse(oracle, 4, opt.r0_star * f) >= opt.nmse);
  const double tiny = linearized_nmse(oracle, 4, 1e-9);
  CHECK((std::isinf(tiny) || tiny > opt.nmse));
  CHECK_THROWS_AS(optimize_r0(oracle, 1), fsopoint::domain_error);
}

TEST_CASE("optimized linearized beats modified intensity uniform in the wide regime") {
  for (double x : {2.0, 4.0}) {
    const auto oracle = sample_oracle(x, 1.0, default_grid(x, 1.0));
    const double lin = optimize_r0(oracle, 4).nmse;
    const double miu = nmse_against(oracle, make_model(ModelKind::modified_intensity_uniform, x, 1.0));
    CHECK(lin < miu);
  }
}

TEST_CASE("quadratic fit recovers exact coefficients") {
  const std::vector<double> xs = {2, 2.5, 3, 3.5, 4, 4.5, 5};
  std::vector<double> ys;
  for (double x : xs) ys.push_back(0.72 * x * x + 0.08 * x + 1.01);
  const auto fit = quadratic_fit(xs, ys);
  CHECK_THAT(fit.a2, WithinAbs(0.72, 1e-12));
  CHECK_THAT(fit.a1, WithinAbs(0.08, 1e-11));
  CHECK_THAT(fit.a0, WithinAbs(1.01, 1e-11));
  CHECK_THAT(fit.r_squared, WithinAbs(1.0, 1e-14));
  CHECK_THAT(fit(3.0), WithinRel(0.72 * 9 + 0.24 + 1.01, 1e-13));
}

TEST_CASE("quadratic fit with noise has R^2 below one") {
  const std::vector<double> xs = {0, 1, 2, 3, 4, 5};
  const std::vector<double> ys = {1.0, 2.1, 4.9, 10.2, 16.8, 26.1};
  const auto fit = quadratic_fit(xs, ys);
  CHECK(fit.r_squared < 1.0);
  CHECK(fit.r_squared > 0.99);
}

TEST_CASE("degenerate fits are rejected") {
  const std::vector<double> two = {1, 2};
  CHECK_THROWS_AS(quadratic_fit(two, two), fsopoint::fit_error);
  const std::vector<double> same = {3, 3, 3, 3};
  const std::vector<double> ys = {1, 2, 3, 4};
  CHECK_THROWS_AS(quadratic_fit(same, ys), fsopoint::fit_error);
  const std::vector<double> three = {1, 2, 3};
  CHECK_THROWS_AS(quadratic_fit(three, ys), fsopoint::fit_error);
}

TEST_CASE("nmse_table matches single evaluations and is sorted") {
  std::vector<TableCase> cases;
  for (double x : {6.0, 2.0}) {
    for (auto m : kWideBeamModels) cases.push_back({m, x});
  }
  const auto cells = nmse_table(cases, TablePolicy{});
  REQUIRE(cells.size() == cases.size());
  CHECK(std::is_sorted(cells.begin(), cells.end(), [](const TableCell& a, const TableCell& b) {
    return a.model != b.model ? a.model < b.model : a.wz_over_ra < b.wz_over_ra;
  }));
  for (const auto& c : cells) {
    REQUIRE(c.report);
    CHECK(c.error.empty());
    if (c.model == ModelKind::linearized) {
      REQUIRE(c.r0_over_ra);
      continue;
    }
    const auto single = nmse(make_model(c.model, c.wz_over_ra, 1.0), c.wz_over_ra, 1.0, default_grid(c.wz_over_ra, 1.0));
    CHECK(c.report->nmse == single.nmse);
  }
}

TEST_CASE("failing cells carry an error instead of aborting the table") {
  const std::vector<TableCase> cases = {{ModelKind::intensity_uniform, 0.5}, {ModelKind::farid, 0.5}};
  const auto cells = nmse_table(cases, TablePolicy{});
  REQUIRE(cells.size() == 2);
  for (const auto& c : cells) {
    if (c.model == ModelKind::intensity_uniform) {
      CHECK_FALSE(c.report);
      CHECK_FALSE(c.error.empty());
    } else {
      CHECK(c.report);
    }
  }
}

TEST_CASE("grid density changes values but not the ranking") {
  auto ranking = [](int points) {
    std::vector<TableCase> cases;
    for (auto m : kWideBeamModels) cases.push_back({m, 4.0});
    TablePolicy p;
    p.grid_points = points;
    auto cells = nmse_table(cases, p);
    std::sort(cells.begin(), cells.end(), [](const auto& a, const auto& b) { return a.report->nmse < b.report->nmse; });
    std::vector<ModelKind> order;
    for (const auto& c : cells) order.push_back(c.model);
    return order;
  };
  CHECK(ranking(500) == ranking(1000));
}
