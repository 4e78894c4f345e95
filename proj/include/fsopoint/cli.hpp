#pragma once

// Command implementations behind the `fsopoint` tool. Each command turns a
// RunConfig into a self-describing CSV document ('#' metadata lines, then a
// header row, then data rows). Flag parsing lives in tools/fsopoint.cpp.

#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "fsopoint/metrics.hpp"
#include "fsopoint/models.hpp"
#include "fsopoint/oracle.hpp"
#include "fsopoint/stats.hpp"

namespace fsopoint::cli {

inline constexpr const char* kVersion = "0.1.0";

enum class ExitCode : int { ok = 0, usage = 2, numeric = 3 };

class usage_error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

enum class Precision { table, full };

struct RunConfig {
  std::string command;

  // global
  double ra = 1.0;
  std::optional<double> tol;  // relative quadrature tolerance
  std::optional<double> grid_max_mult;
  int grid_points = 1000;
  std::uint64_t seed = 1;
  Precision precision = Precision::table;
  unsigned threads = 1;

  // model selection
  std::string model;
  std::vector<double> wz_over_ra;
  std::vector<double> r_over_ra;
  bool use_grid = false;
  bool no_oracle = false;
  std::vector<int> splits{4};
  std::optional<double> r0_over_ra;
  std::vector<int> k_list{1};
  std::vector<int> k_study_list{1, 2, 3};
  std::string alpha_mode = "asymptotic";
  bool optimize_linearized = true;

  // fit-r0
  std::vector<double> ratio_range{2.0, 6.0};
  int ratio_steps = 9;

  // pdf / mc
  std::string family;
  std::vector<double> params;
  std::optional<double> sigma_s;
  std::size_t mc_samples = 0;
  std::size_t bins = 100;

  QuadratureSpec quadrature() const {
    QuadratureSpec q;
    if (tol) q.rel_tol = *tol;
    return q;
  }
};

// ---------------------------------------------------------------------------
// CSV document

using Cell = std::variant<std::string, double, long long>;

struct CsvDocument {
  std::vector<std::string> metadata;
  std::vector<std::string> header;
  std::vector<std::vector<Cell>> rows;
};

inline std::string format_number(double v, Precision p) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, p == Precision::full ? "%.17g" : "%.6g", v);
  return buf;
}

/// Shortest text that reads back to the same double; used in metadata lines.
inline std::string exact(double v) {
  if (!std::isfinite(v)) return format_number(v, Precision::full);
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

inline std::string render(const CsvDocument& doc, Precision p) {
  std::ostringstream os;
  for (const auto& m : doc.metadata) os << "# " << m << '\n';
  for (std::size_t i = 0; i < doc.header.size(); ++i) os << (i ? "," : "") << csv_escape(doc.header[i]);
  os << '\n';
  for (const auto& row : doc.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) os << ',';
      if (const auto* s = std::get_if<std::string>(&row[i])) os << csv_escape(*s);
      else if (const auto* d = std::get_if<double>(&row[i])) os << format_number(*d, p);
      else os << std::get<long long>(row[i]);
    }
    os << '\n';
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// helpers

namespace detail {

inline std::string join(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ";" : "") + exact(v[i]);
  return s;
}

inline std::vector<std::string> base_metadata(const RunConfig& c) {
  const QuadratureSpec q = c.quadrature();
  std::vector<std::string> m;
  m.push_back(std::string("fsopoint ") + kVersion + " " + c.command);
  m.push_back("ra=" + exact(c.ra));
  m.push_back("quadrature rel_tol=" + exact(q.rel_tol) +
              " abs_tol=" + exact(q.abs_tol) +
              " max_subdivisions=" + std::to_string(q.max_subdivisions));
  return m;
}

inline std::string grid_description(const EvalGrid& g, double ra) {
  return "grid r/ra in [" + exact(g.r_min / ra) + ", " +
         exact(g.r_max / ra) + "], " + std::to_string(g.count) + " points";
}

inline std::string grid_policy(const RunConfig& c) {
  std::string mult = c.grid_max_mult ? exact(*c.grid_max_mult) : std::string("default");
  return "grid policy: r in [0, m*wz] if wz>=ra (m=3) else [0, m*ra] (m=2); m=" + mult +
         ", points=" + std::to_string(c.grid_points);
}

inline AlphaMode parse_alpha_mode(const std::string& s) {
  if (s == "asymptotic") return AlphaMode::asymptotic;
  if (s == "exact-bessel" || s == "exact") return AlphaMode::exact_bessel;
  throw usage_error("unknown --alpha-mode '" + s + "' (asymptotic | exact-bessel)");
}

inline void require_ratios(const RunConfig& c, const char* what) {
  if (c.wz_over_ra.empty()) throw usage_error(std::string(what) + " needs --wz-over-ra");
  for (double v : c.wz_over_ra) {
    if (!(v > 0.0)) throw usage_error("--wz-over-ra values must be > 0");
  }
}

inline void check_common(const RunConfig& c) {
  if (!(c.ra > 0.0)) throw usage_error("--ra must be > 0");
  if (c.tol && !(*c.tol > 0.0)) throw usage_error("--tol must be > 0");
  if (c.grid_points < 2) throw usage_error("--grid-points must be >= 2");
  if (c.grid_max_mult && !(*c.grid_max_mult > 0.0)) throw usage_error("--grid-max-mult must be > 0");
}

inline ModelKind require_model(const std::string& name) {
  if (auto k = parse_model_name(name)) return *k;
  throw usage_error("unknown model '" + name + "'");
}

inline EvalGrid grid_for(const RunConfig& c, double wz) {
  return default_grid(wz, c.ra, c.grid_points, c.grid_max_mult);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// eval

/// Builds the model used by `eval`; linearized without --r0-over-ra is
/// calibrated by optimize_r0 on the command's default grid.
inline PointingModel eval_model(const RunConfig& c, ModelKind kind, double wz) {
  ModelOptions opts;
  opts.splits = c.splits.front();
  opts.k = c.k_list.front();
  opts.alpha_mode = detail::parse_alpha_mode(c.alpha_mode);
  if (kind == ModelKind::linearized) {
    if (c.r0_over_ra) {
      opts.r0 = *c.r0_over_ra * c.ra;
    } else {
      opts.r0 = optimize_r0(wz, c.ra, opts.splits, detail::grid_for(c, wz), c.quadrature()).r0_star;
    }
  }
  return make_model(kind, wz, c.ra, opts);
}

inline CsvDocument cmd_eval(const RunConfig& c) {
  detail::check_common(c);
  const ModelKind kind = detail::require_model(c.model);
  if (c.wz_over_ra.size() != 1) throw usage_error("eval needs exactly one --wz-over-ra");
  detail::require_ratios(c, "eval");
  if (c.use_grid == !c.r_over_ra.empty()) throw usage_error("eval needs exactly one of --r-over-ra or --grid");
  const double wz = c.wz_over_ra.front() * c.ra;
  const PointingModel model = eval_model(c, kind, wz);
  const QuadratureSpec q = c.quadrature();

  std::vector<double> rs;
  CsvDocument doc{detail::base_metadata(c), {}, {}};
  doc.metadata.push_back("model=" + std::string(model_name(kind)) +
                         " wz/ra=" + exact(c.wz_over_ra.front()));
  if (kind == ModelKind::linearized) {
    const auto& p = std::get<ExpFamilyParams>(model.params());
    doc.metadata.push_back("linearized n=" + std::to_string(c.splits.front()) +
                           " c1=" + exact(p.c1) +
                           " c2=" + exact(p.c2));
  }
  if (c.use_grid) {
    const EvalGrid g = detail::grid_for(c, wz);
    doc.metadata.push_back(detail::grid_description(g, c.ra));
    rs = g.points();
  } else {
    for (double v : c.r_over_ra) {
      if (!(v >= 0.0)) throw usage_error("--r-over-ra values must be >= 0");
      rs.push_back(v * c.ra);
    }
  }
  doc.header = c.no_oracle ? std::vector<std::string>{"r_over_ra", "hp_model"}
                           : std::vector<std::string>{"r_over_ra", "hp_model", "hp_oracle", "abs_err"};
  for (double r : rs) {
    const double hm = model(r);
    std::vector<Cell> row{r / c.ra, hm};
    if (!c.no_oracle) {
      const double ho = hp_exact_radial(r, wz, c.ra, q);
      row.push_back(ho);
      row.push_back(std::abs(hm - ho));
    }
    doc.rows.push_back(std::move(row));
  }
  return doc;
}

// ---------------------------------------------------------------------------
// table1 / table2

inline TablePolicy table_policy(const RunConfig& c) {
  TablePolicy p;
  p.ra = c.ra;
  p.grid_points = c.grid_points;
  p.grid_max_mult = c.grid_max_mult;
  p.spec = c.quadrature();
  p.model_options.splits = c.splits.front();
  p.model_options.k = c.k_list.front();
  p.model_options.alpha_mode = detail::parse_alpha_mode(c.alpha_mode);
  p.optimize_linearized = c.optimize_linearized;
  return p;
}

namespace detail {

// Rows are models, columns are ratios.
inline CsvDocument model_by_ratio_table(const RunConfig& c, std::span<const ModelKind> models,
                                        const std::vector<double>& ratios, bool models_as_rows) {
  std::vector<TableCase> cases;
  for (ModelKind m : models) {
    for (double x : ratios) cases.push_back({m, x});
  }
  const auto cells = nmse_table(cases, table_policy(c));
  auto find = [&](ModelKind m, double x) -> const TableCell& {
    for (const auto& cell : cells) {
      if (cell.model == m && cell.wz_over_ra == x) return cell;
    }
    throw std::logic_error("missing table cell");
  };
  auto value = [](const TableCell& cell) -> Cell {
    if (cell.report) return cell.report->nmse;
    return "error: " + cell.error;
  };

  CsvDocument doc{base_metadata(c), {}, {}};
  doc.metadata.push_back(grid_policy(c));
  for (double x : ratios) {
    const EvalGrid g = default_grid(x * c.ra, c.ra, c.grid_points, c.grid_max_mult);
    doc.metadata.push_back("wz/ra=" + exact(x) + ": " + grid_description(g, c.ra));
  }
  for (const auto& cell : cells) {
    if (cell.r0_over_ra) {
      doc.metadata.push_back("linearized n=" + std::to_string(c.splits.front()) + " wz/ra=" +
                             exact(cell.wz_over_ra) + " r0/ra=" +
                             exact(*cell.r0_over_ra) +
                             (c.optimize_linearized ? " (optimized)" : " (fitted quadratic)"));
    }
  }
  doc.metadata.push_back("cells: NMSE = ||h - h_model||^2 / ||h||^2");

  if (models_as_rows) {
    doc.header.push_back("model");
    for (double x : ratios) doc.header.push_back("wz/ra=" + format_number(x, Precision::table));
    for (ModelKind m : models) {
      std::vector<Cell> row{std::string(model_name(m))};
      for (double x : ratios) row.push_back(value(find(m, x)));
      doc.rows.push_back(std::move(row));
    }
  } else {
    doc.header.push_back("wz_over_ra");
    for (ModelKind m : models) doc.header.push_back(std::string(model_name(m)));
    for (double x : ratios) {
      std::vector<Cell> row{x};
      for (ModelKind m : models) row.push_back(value(find(m, x)));
      doc.rows.push_back(std::move(row));
    }
  }
  return doc;
}

}  // namespace detail

inline CsvDocument cmd_table1(const RunConfig& c) {
  detail::check_common(c);
  std::vector<double> ratios = c.wz_over_ra.empty() ? std::vector<double>{2.0, 4.0, 6.0} : c.wz_over_ra;
  for (double x : ratios) {
    if (!(x > 0.0)) throw usage_error("--wz-over-ra values must be > 0");
  }
  return detail::model_by_ratio_table(c, kWideBeamModels, ratios, true);
}

inline CsvDocument cmd_table2(const RunConfig& c) {
  detail::check_common(c);
  std::vector<double> ratios = c.wz_over_ra.empty() ? std::vector<double>{0.05, 0.1, 0.2, 0.3} : c.wz_over_ra;
  for (double x : ratios) {
    if (!(x > 0.0 && x < 1.0)) throw usage_error("table2 ratios must lie in (0, 1)");
  }
  return detail::model_by_ratio_table(c, kNarrowBeamModels, ratios, false);
}

// ---------------------------------------------------------------------------
// optimize-r0 / fit-r0

inline CsvDocument cmd_optimize_r0(const RunConfig& c) {
  detail::check_common(c);
  detail::require_ratios(c, "optimize-r0");
  CsvDocument doc{detail::base_metadata(c), {"n", "wz_over_ra", "r0_star_over_ra", "nmse"}, {}};
  doc.metadata.push_back(detail::grid_policy(c));
  for (int n : c.splits) {
    if (n < 2) throw usage_error("--n must be >= 2");
    for (double x : c.wz_over_ra) {
      const double wz = x * c.ra;
      const R0Optimum opt = optimize_r0(wz, c.ra, n, detail::grid_for(c, wz), c.quadrature());
      doc.rows.push_back({static_cast<long long>(n), x, opt.r0_star / c.ra, opt.nmse});
    }
  }
  return doc;
}

struct FitSweepPoint {
  double wz_over_ra;
  std::optional<R0Optimum> optimum;  // in units of ra for r0
  double nmse_modified_iu = 0.0;
  std::string error;
};

struct FitSweep {
  int splits;
  std::vector<FitSweepPoint> points;
  std::optional<QuadraticFit> fit;
  std::string fit_error;
};

inline std::vector<double> sweep_ratios(const RunConfig& c) {
  if (c.ratio_range.size() != 2 || !(c.ratio_range[0] > 0.0) || !(c.ratio_range[1] > c.ratio_range[0])) {
    throw usage_error("--ratio-range needs two values 0 < lo < hi");
  }
  if (c.ratio_steps < 3) throw usage_error("--ratio-steps must be >= 3");
  std::vector<double> xs;
  for (int i = 0; i < c.ratio_steps; ++i) {
    xs.push_back(c.ratio_range[0] + (c.ratio_range[1] - c.ratio_range[0]) * i / (c.ratio_steps - 1));
  }
  xs.back() = c.ratio_range[1];
  return xs;
}

/// r0* sweep over wz/ra and its quadratic fit, for one split count.
inline FitSweep run_fit_sweep(const RunConfig& c, int splits, const std::vector<double>& ratios) {
  FitSweep out{splits, {}, std::nullopt, {}};
  std::vector<double> xs, ys;
  for (double x : ratios) {
    FitSweepPoint pt{x, std::nullopt, 0.0, {}};
    try {
      const double wz = x * c.ra;
      const SampledOracle oracle = sample_oracle(wz, c.ra, detail::grid_for(c, wz), c.quadrature());
      R0Optimum opt = optimize_r0(oracle, splits);
      opt.r0_star /= c.ra;
      pt.optimum = opt;
      pt.nmse_modified_iu = nmse_against(oracle, make_model(ModelKind::modified_intensity_uniform, wz, c.ra));
      xs.push_back(x);
      ys.push_back(opt.r0_star);
    } catch (const std::exception& e) {
      pt.error = e.what();
    }
    out.points.push_back(std::move(pt));
  }
  try {
    out.fit = quadratic_fit(xs, ys);
  } catch (const std::exception& e) {
    out.fit_error = e.what();
  }
  return out;
}

inline CsvDocument cmd_fit_r0(const RunConfig& c) {
  detail::check_common(c);
  for (int n : c.splits) {
    if (n < 2 || n % 2 != 0) throw usage_error("--n values must be even and >= 2");
  }
  const std::vector<double> ratios = sweep_ratios(c);
  std::vector<FitSweep> sweeps;
  for (int n : c.splits) sweeps.push_back(run_fit_sweep(c, n, ratios));

  CsvDocument doc{detail::base_metadata(c),
                  {"n", "wz_over_ra", "r0_star_over_ra", "nmse_linearized", "nmse_modified_iu", "nmse_ratio", "status"},
                  {}};
  doc.metadata.push_back(detail::grid_policy(c));
  doc.metadata.push_back("sweep wz/ra=" + detail::join(ratios));
  for (const auto& s : sweeps) {
    if (s.fit) {
      doc.metadata.push_back("fit n=" + std::to_string(s.splits) + ": r0*/ra = " +
                             exact(s.fit->a2) + "*x^2 + " +
                             exact(s.fit->a1) + "*x + " +
                             exact(s.fit->a0) +
                             " R2=" + exact(s.fit->r_squared));
    } else {
      doc.metadata.push_back("fit n=" + std::to_string(s.splits) + ": failed: " + s.fit_error);
    }
  }
  if (sweeps.size() >= 2) {
    double gap = 0.0;
    for (std::size_t i = 0; i < ratios.size(); ++i) {
      const auto& a = sweeps[0].points[i];
      const auto& b = sweeps[1].points[i];
      if (!a.optimum || !b.optimum) continue;
      const double ra = a.nmse_modified_iu / a.optimum->nmse;
      const double rb = b.nmse_modified_iu / b.optimum->nmse;
      gap = std::max(gap, std::abs(ra - rb) / std::max(ra, rb));
    }
    doc.metadata.push_back("max relative gap of nmse_ratio between n=" + std::to_string(sweeps[0].splits) +
                           " and n=" + std::to_string(sweeps[1].splits) + ": " +
                           exact(gap));
  }
  for (const auto& s : sweeps) {
    for (const auto& p : s.points) {
      if (p.optimum) {
        doc.rows.push_back({static_cast<long long>(s.splits), p.wz_over_ra, p.optimum->r0_star, p.optimum->nmse,
                            p.nmse_modified_iu, p.nmse_modified_iu / p.optimum->nmse, std::string("ok")});
      } else {
        const double nan = std::nan("");
        doc.rows.push_back({static_cast<long long>(s.splits), p.wz_over_ra, nan, nan, nan, nan,
                            "failed: " + p.error});
      }
    }
  }
  return doc;
}

// ---------------------------------------------------------------------------
// k-study

inline CsvDocument cmd_k_study(const RunConfig& c) {
  detail::check_common(c);
  const double x = c.wz_over_ra.empty() ? 0.1 : c.wz_over_ra.front();
  if (!(x > 0.0)) throw usage_error("--wz-over-ra must be > 0");
  if (c.k_study_list.empty()) throw usage_error("--k-list must not be empty");
  const AlphaMode mode = detail::parse_alpha_mode(c.alpha_mode);
  const double wz = x * c.ra;
  const EvalGrid g = detail::grid_for(c, wz);
  const SampledOracle oracle = sample_oracle(wz, c.ra, g, c.quadrature());
  CsvDocument doc{detail::base_metadata(c), {"k", "alpha", "nmse"}, {}};
  doc.metadata.push_back("wz/ra=" + exact(x) + " " + detail::grid_description(g, c.ra));
  for (int k : c.k_study_list) {
    if (k < 1) throw usage_error("--k-list values must be >= 1");
    const PointApproxParams p = point_approx_params(wz, c.ra, k, mode);
    doc.rows.push_back({static_cast<long long>(k), p.alpha,
                        nmse_against(oracle, [&p](double r) { return point_approx_eval(p, r); })});
  }
  return doc;
}

// ---------------------------------------------------------------------------
// pdf / mc

struct PdfFamily {
  std::variant<ExpFamilyHpLaw, PointApproxHpLaw, SecondReducedHpLaw> law;
  std::string description;
};

/// exp-family: --params c1,c2 (or --wz-over-ra, modified intensity-uniform);
/// point-approx: --params alpha (or --wz-over-ra, asymptotic alpha, k = 1);
/// second-reduced: --params lambda (or --wz-over-ra).
inline PdfFamily pdf_family(const RunConfig& c) {
  if (!c.sigma_s || !(*c.sigma_s > 0.0)) throw usage_error("--sigma-s must be given and > 0");
  const double s = *c.sigma_s;
  const bool from_ratio = c.params.empty();
  if (from_ratio && c.wz_over_ra.size() != 1) throw usage_error("pdf needs --params or one --wz-over-ra");
  if (!from_ratio && !c.wz_over_ra.empty()) throw usage_error("give either --params or --wz-over-ra, not both");
  const double wz = from_ratio ? c.wz_over_ra.front() * c.ra : 0.0;
  if (from_ratio && !(wz > 0.0)) throw usage_error("--wz-over-ra must be > 0");
  auto full = [](double v) { return exact(v); };

  if (c.family == "exp-family") {
    double c1, c2;
    if (from_ratio) {
      const ExpFamilyParams p = modified_intensity_uniform_params(wz, c.ra);
      c1 = p.c1;
      c2 = p.c2;
    } else {
      if (c.params.size() != 2) throw usage_error("exp-family --params needs c1,c2");
      c1 = c.params[0];
      c2 = c.params[1];
    }
    if (!(c1 > 0.0 && c1 <= 1.0) || !(c2 > 0.0)) throw usage_error("exp-family needs c1 in (0,1], c2 > 0");
    ExpFamilyHpLaw law{c1, c2, s};
    return {law, "exp-family c1=" + full(c1) + " c2=" + full(c2) + " gamma2=" + full(law.gamma2())};
  }
  if (c.family == "point-approx") {
    double alpha;
    if (from_ratio) {
      alpha = point_approx_params(wz, c.ra, 1, detail::parse_alpha_mode(c.alpha_mode)).alpha;
    } else {
      if (c.params.size() != 1) throw usage_error("point-approx --params needs alpha");
      alpha = c.params[0];
    }
    if (!(alpha > 0.0)) throw usage_error("point-approx needs alpha > 0");
    return {PointApproxHpLaw{c.ra, s, alpha}, "point-approx k=1 alpha=" + full(alpha)};
  }
  if (c.family == "second-reduced") {
    double lambda;
    if (from_ratio) {
      lambda = second_reduced_vasylyev_params(wz, c.ra).lambda;
    } else {
      if (c.params.size() != 1) throw usage_error("second-reduced --params needs lambda");
      lambda = c.params[0];
    }
    if (!(lambda > 0.0)) throw usage_error("second-reduced needs lambda > 0");
    return {SecondReducedHpLaw{c.ra, s, lambda}, "second-reduced lambda=" + full(lambda)};
  }
  throw usage_error("unknown --family '" + c.family + "' (exp-family | point-approx | second-reduced)");
}

/// The r -> h_p map whose push-forward the family's law describes.
inline double family_model(const PdfFamily& f, double r) {
  return std::visit(
      [r](const auto& law) -> double {
        using T = std::decay_t<decltype(law)>;
        if constexpr (std::is_same_v<T, ExpFamilyHpLaw>) return law.c1 * std::exp(-law.c2 * r * r);
        else if constexpr (std::is_same_v<T, PointApproxHpLaw>)
          return point_approx_eval(PointApproxParams{law.alpha, 1, law.ra}, r);
        else return second_reduced_eval(law.lambda, law.ra, r);
      },
      f.law);
}

inline double family_pdf(const PdfFamily& f, double h) {
  return std::visit(
      [h](const auto& law) -> double {
        using T = std::decay_t<decltype(law)>;
        if constexpr (std::is_same_v<T, ExpFamilyHpLaw>) return law.pdf(h);
        else {
          if (!(h > 0.0 && h < 1.0)) return 0.0;
          return law.pdf(h);
        }
      },
      f.law);
}

inline CsvDocument cmd_pdf(const RunConfig& c) {
  detail::check_common(c);
  if (c.bins < 1) throw usage_error("--bins must be >= 1");
  const PdfFamily fam = pdf_family(c);
  CsvDocument doc{detail::base_metadata(c), {}, {}};
  doc.metadata.push_back(fam.description + " sigma_s=" + exact(*c.sigma_s));
  const double mass = std::visit([](const auto& law) { return total_mass(law); }, fam.law);
  doc.metadata.push_back("analytic total mass=" + exact(mass));

  std::optional<Histogram> hist;
  if (c.mc_samples > 0) {
    auto model = [&fam](double r) { return family_model(fam, r); };
    const auto samples = monte_carlo_hp_samples(model, *c.sigma_s, c.mc_samples, c.seed, c.threads);
    const TabulatedCdf cdf = std::visit([](const auto& law) { return TabulatedCdf::build(law); }, fam.law);
    doc.metadata.push_back("monte carlo samples=" + std::to_string(c.mc_samples) + " seed=" + std::to_string(c.seed));
    doc.metadata.push_back("ks_distance=" + exact(ks_distance(samples, cdf)));
    Histogram h;
    h.bin_edges.resize(c.bins + 1);
    for (std::size_t i = 0; i <= c.bins; ++i) h.bin_edges[i] = static_cast<double>(i) / static_cast<double>(c.bins);
    h.counts.assign(c.bins, 0);
    h.total = samples.size();
    for (double v : samples) ++h.counts[hist_bin(v, c.bins)];
    hist = std::move(h);
  }
  doc.header = hist ? std::vector<std::string>{"hp", "analytic_density", "empirical_density"}
                    : std::vector<std::string>{"hp", "analytic_density"};
  for (std::size_t i = 0; i < c.bins; ++i) {
    const double center = (static_cast<double>(i) + 0.5) / static_cast<double>(c.bins);
    std::vector<Cell> row{center, family_pdf(fam, center)};
    if (hist) row.push_back(hist->density(i));
    doc.rows.push_back(std::move(row));
  }
  return doc;
}

inline CsvDocument cmd_mc(const RunConfig& c) {
  detail::check_common(c);
  const ModelKind kind = detail::require_model(c.model);
  if (c.wz_over_ra.size() != 1) throw usage_error("mc needs exactly one --wz-over-ra");
  detail::require_ratios(c, "mc");
  if (!c.sigma_s || !(*c.sigma_s > 0.0)) throw usage_error("--sigma-s must be given and > 0");
  if (c.mc_samples < 1) throw usage_error("--mc-samples must be >= 1");
  if (c.bins < 1) throw usage_error("--bins must be >= 1");
  const double wz = c.wz_over_ra.front() * c.ra;
  const PointingModel model = eval_model(c, kind, wz);
  const Histogram h = monte_carlo_hp_hist(model, *c.sigma_s, c.mc_samples, c.bins, c.seed, c.threads);
  CsvDocument doc{detail::base_metadata(c), {"bin_lo", "bin_hi", "count", "density"}, {}};
  doc.metadata.push_back("model=" + std::string(model_name(kind)) + " wz/ra=" +
                         exact(c.wz_over_ra.front()) +
                         " sigma_s=" + exact(*c.sigma_s));
  doc.metadata.push_back("samples=" + std::to_string(c.mc_samples) + " seed=" + std::to_string(c.seed));
  for (std::size_t i = 0; i < c.bins; ++i) {
    doc.rows.push_back({h.bin_edges[i], h.bin_edges[i + 1], static_cast<long long>(h.counts[i]), h.density(i)});
  }
  return doc;
}

// ---------------------------------------------------------------------------

inline CsvDocument run_command(const RunConfig& c) {
  if (c.command == "eval") return cmd_eval(c);
  if (c.command == "table1") return cmd_table1(c);
  if (c.command == "table2") return cmd_table2(c);
  if (c.command == "optimize-r0") return cmd_optimize_r0(c);
  if (c.command == "fit-r0") return cmd_fit_r0(c);
  if (c.command == "k-study") return cmd_k_study(c);
  if (c.command == "pdf") return cmd_pdf(c);
  if (c.command == "mc") return cmd_mc(c);
  throw usage_error("unknown command '" + c.command + "'");
}

/// Maps an exception escaping run_command to the documented exit code.
inline ExitCode classify(const std::exception& e) {
  if (dynamic_cast<const usage_error*>(&e) || dynamic_cast<const domain_error*>(&e)) return ExitCode::usage;
  return ExitCode::numeric;
}

}  // namespace fsopoint::cli
