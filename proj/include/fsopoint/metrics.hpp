#pragma once

// Model accuracy against the exact efficiency: NMSE on a radial grid,
// optimal calibration radius of the linearized model, and the quadratic
// relation r0*/ra vs wz/ra.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fsopoint/errors.hpp"
#include "fsopoint/models.hpp"
#include "fsopoint/oracle.hpp"
#include "fsopoint/quadrature.hpp"

namespace fsopoint {

/// Uniform, endpoint-inclusive radial sampling [m].
struct EvalGrid {
  double r_min = 0.0;
  double r_max = 1.0;
  int count = 1000;

  void validate() const {
    detail::require_non_negative(r_min, "r_min");
    if (!(r_max > r_min)) throw domain_error("grid needs r_max > r_min");
    if (count < 2) throw domain_error("grid needs at least 2 points");
  }

  double at(int i) const { return r_min + (r_max - r_min) * static_cast<double>(i) / (count - 1); }

  std::vector<double> points() const {
    validate();
    std::vector<double> r(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) r[i] = at(i);
    r.back() = r_max;
    return r;
  }
};

/// r in [0, mult * wz] when wz >= ra (mult defaults to 3), else r in [0, mult * ra]
/// (mult defaults to 2).
inline EvalGrid default_grid(double wz, double ra, int count = 1000, std::optional<double> mult = std::nullopt) {
  detail::require_positive(wz, "wz");
  detail::require_positive(ra, "ra");
  const bool wide = wz >= ra;
  const double m = mult.value_or(wide ? 3.0 : 2.0);
  detail::require_positive(m, "grid multiplier");
  return {0.0, m * (wide ? wz : ra), count};
}

/// Exact efficiency tabulated once on a grid; reused for every model scored on it.
struct SampledOracle {
  double wz;
  double ra;
  EvalGrid grid;
  QuadratureSpec spec;
  std::vector<double> r;
  std::vector<double> h;
  double energy;  // sum h^2
};

inline SampledOracle sample_oracle(double wz, double ra, const EvalGrid& grid, const QuadratureSpec& spec = {}) {
  SampledOracle out{wz, ra, grid, spec, grid.points(), {}, 0.0};
  out.h.reserve(out.r.size());
  for (double r : out.r) {
    const double h = hp_exact_radial(r, wz, ra, spec);
    out.h.push_back(h);
    out.energy += h * h;
  }
  return out;
}

template <class Model>
double nmse_against(const SampledOracle& oracle, const Model& model) {
  double err = 0.0;
  for (std::size_t i = 0; i < oracle.r.size(); ++i) {
    const double d = oracle.h[i] - model(oracle.r[i]);
    err += d * d;
  }
  return err / oracle.energy;
}

struct NmseReport {
  std::string model_label;
  double wz_over_ra = 0.0;
  double nmse = 0.0;
  EvalGrid grid;
  QuadratureSpec oracle_tol;
};

/// ||h - h_model||^2 / ||h||^2 over the grid, h from the radial oracle.
template <class Model>
NmseReport nmse(const Model& model, double wz, double ra, const EvalGrid& grid, const QuadratureSpec& spec = {},
                std::string label = "custom") {
  const SampledOracle oracle = sample_oracle(wz, ra, grid, spec);
  return {std::move(label), wz / ra, nmse_against(oracle, model), grid, spec};
}

// ---------------------------------------------------------------------------
// Linearized model calibration

struct R0Optimum {
  double r0_star;  // [m]
  double nmse;
};

inline double linearized_nmse(const SampledOracle& oracle, int splits, double r0) {
  try {
    const ExpFamilyParams p = linearized_params(oracle.wz, oracle.ra, LinearizedSpec{splits, r0});
    return nmse_against(oracle, [&p](double r) { return exp_family_eval(p, r); });
  } catch (const calibration_error&) {
    return std::numeric_limits<double>::infinity();
  }
}

/// Coarse scan of 200 points over (0, 3 (wz/ra)^2 ra], then golden-section
/// refinement inside the neighbouring scan cells down to relative width 1e-6.
inline R0Optimum optimize_r0(const SampledOracle& oracle, int splits) {
  if (splits < 2) throw domain_error("linearized model needs n >= 2 splits");
  constexpr int kScan = 200;
  const double ratio = oracle.wz / oracle.ra;
  const double upper = 2.0 * ratio * ratio * oracle.ra * 1.5;

  std::vector<double> xs(kScan), fs(kScan);
  int best = -1;
  for (int i = 0; i < kScan; ++i) {
    xs[i] = upper * (i + 1) / kScan;
    fs[i] = linearized_nmse(oracle, splits, xs[i]);
    if (std::isfinite(fs[i]) && (best < 0 || fs[i] < fs[best])) best = i;  // strict: ties keep smaller r0
  }
  if (best < 0) {
    throw optimization_error("optimize_r0: every scanned r0 failed calibration (wz/ra = " + std::to_string(ratio) +
                             ")");
  }

  double lo = best > 0 ? xs[best - 1] : 0.5 * xs[0];
  double hi = best + 1 < kScan ? xs[best + 1] : xs[best];
  R0Optimum out{xs[best], fs[best]};
  auto consider = [&](double x, double f) {
    if (f < out.nmse || (f == out.nmse && x < out.r0_star)) out = {x, f};
  };

  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - inv_phi * (hi - lo);
  double x2 = lo + inv_phi * (hi - lo);
  double f1 = linearized_nmse(oracle, splits, x1);
  double f2 = linearized_nmse(oracle, splits, x2);
  consider(x1, f1);
  consider(x2, f2);
  while (hi - lo > 1e-6 * 0.5 * (hi + lo)) {
    if (f1 <= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - inv_phi * (hi - lo);
      f1 = linearized_nmse(oracle, splits, x1);
      consider(x1, f1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + inv_phi * (hi - lo);
      f2 = linearized_nmse(oracle, splits, x2);
      consider(x2, f2);
    }
  }
  return out;
}

inline R0Optimum optimize_r0(double wz, double ra, int splits, const EvalGrid& grid, const QuadratureSpec& spec = {}) {
  return optimize_r0(sample_oracle(wz, ra, grid, spec), splits);
}

// ---------------------------------------------------------------------------
// Quadratic least squares

struct QuadraticFit {
  double a2 = 0.0;
  double a1 = 0.0;
  double a0 = 0.0;
  double r_squared = 0.0;

  double operator()(double x) const { return (a2 * x + a1) * x + a0; }
};

/// Ordinary least squares of y on {1, x, x^2} via column-pivoted QR.
inline QuadraticFit quadratic_fit(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) throw fit_error("quadratic_fit: xs and ys differ in length");
  if (xs.size() < 3) throw fit_error("quadratic_fit: need at least 3 points");
  const auto n = static_cast<Eigen::Index>(xs.size());
  Eigen::MatrixXd design(n, 3);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double x = xs[static_cast<std::size_t>(i)];
    design(i, 0) = 1.0;
    design(i, 1) = x;
    design(i, 2) = x * x;
    y(i) = ys[static_cast<std::size_t>(i)];
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
  qr.setThreshold(1e-12);
  if (qr.rank() < 3) throw fit_error("quadratic_fit: design matrix is rank deficient");
  const Eigen::Vector3d c = qr.solve(y);

  const Eigen::VectorXd resid = y - design * c;
  const double ss_res = resid.squaredNorm();
  const double ss_tot = (y.array() - y.mean()).square().sum();
  QuadraticFit fit{c(2), c(1), c(0), 1.0};
  if (ss_tot > 0.0) fit.r_squared = 1.0 - ss_res / ss_tot;
  return fit;
}

// ---------------------------------------------------------------------------
// Batch tables

struct TableCase {
  ModelKind model;
  double wz_over_ra;
};

struct TablePolicy {
  double ra = 1.0;
  int grid_points = 1000;
  std::optional<double> grid_max_mult;
  QuadratureSpec spec;
  ModelOptions model_options;
  bool optimize_linearized = true;
};

struct TableCell {
  ModelKind model;
  double wz_over_ra;
  std::optional<NmseReport> report;
  std::optional<double> r0_over_ra;  // linearized only
  std::string error;                 // non-empty when the cell failed
};

/// Evaluates every case; cells sharing a ratio share one oracle sampling.
/// Ratios run concurrently; output is sorted by (model, wz/ra).
inline std::vector<TableCell> nmse_table(std::span<const TableCase> cases, const TablePolicy& policy) {
  std::map<double, std::vector<TableCase>> by_ratio;
  for (const auto& c : cases) by_ratio[c.wz_over_ra].push_back(c);

  auto run_ratio = [&policy](double ratio, const std::vector<TableCase>& group) {
    std::vector<TableCell> cells;
    const double ra = policy.ra;
    const double wz = ratio * ra;
    std::optional<SampledOracle> oracle;
    std::string oracle_error;
    EvalGrid grid;
    try {
      grid = default_grid(wz, ra, policy.grid_points, policy.grid_max_mult);
      oracle = sample_oracle(wz, ra, grid, policy.spec);
    } catch (const std::exception& e) {
      oracle_error = e.what();
    }
    for (const auto& c : group) {
      TableCell cell{c.model, ratio, std::nullopt, std::nullopt, {}};
      if (!oracle) {
        cell.error = oracle_error;
        cells.push_back(std::move(cell));
        continue;
      }
      try {
        ModelOptions opts = policy.model_options;
        if (c.model == ModelKind::linearized && policy.optimize_linearized) {
          const R0Optimum opt = optimize_r0(*oracle, opts.splits);
          opts.r0 = opt.r0_star;
        }
        const PointingModel model = make_model(c.model, wz, ra, opts);
        if (c.model == ModelKind::linearized) {
          cell.r0_over_ra = (opts.r0 ? *opts.r0 : *fitted_r0_over_ra(ratio, opts.splits) * ra) / ra;
        }
        cell.report = NmseReport{std::string(model_name(c.model)), ratio, nmse_against(*oracle, model), grid,
                                 policy.spec};
      } catch (const std::exception& e) {
        cell.error = e.what();
      }
      cells.push_back(std::move(cell));
    }
    return cells;
  };

  std::vector<std::future<std::vector<TableCell>>> jobs;
  for (const auto& [ratio, group] : by_ratio) {
    jobs.push_back(std::async(std::launch::async, run_ratio, ratio, std::cref(group)));
  }
  std::vector<TableCell> out;
  for (auto& j : jobs) {
    auto cells = j.get();
    out.insert(out.end(), cells.begin(), cells.end());
  }
  std::stable_sort(out.begin(), out.end(), [](const TableCell& a, const TableCell& b) {
    if (a.model != b.model) return static_cast<int>(a.model) < static_cast<int>(b.model);
    return a.wz_over_ra < b.wz_over_ra;
  });
  return out;
}

}  // namespace fsopoint
