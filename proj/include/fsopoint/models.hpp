#pragma once

// Closed-form pointing-loss models.
//
// Wide beam (wz >> ra), all of the form c1 exp(-c2 r^2):
//   intensity-uniform, modified intensity-uniform, linearized, Farid,
//   first reduced Vasylyev.
// Narrow beam (ra >> wz):
//   logistic point approximation, second reduced Vasylyev.
// The full Vasylyev model eta exp(-(r/R)^lambda) covers both regimes.

#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <type_traits>
#include <variant>

#include "fsopoint/errors.hpp"
#include "fsopoint/geometry.hpp"
#include "fsopoint/special.hpp"

namespace fsopoint {

enum class ModelKind {
  intensity_uniform,
  modified_intensity_uniform,
  linearized,
  farid,
  first_reduced_vasylyev,
  vasylyev,
  point_approx,
  second_reduced_vasylyev,
};

inline constexpr ModelKind kWideBeamModels[] = {
    ModelKind::farid, ModelKind::first_reduced_vasylyev, ModelKind::modified_intensity_uniform,
    ModelKind::linearized, ModelKind::intensity_uniform};

inline constexpr ModelKind kNarrowBeamModels[] = {ModelKind::point_approx, ModelKind::second_reduced_vasylyev};

inline std::string_view model_name(ModelKind kind) {
  switch (kind) {
    case ModelKind::intensity_uniform: return "intensity-uniform";
    case ModelKind::modified_intensity_uniform: return "modified-iu";
    case ModelKind::linearized: return "linearized";
    case ModelKind::farid: return "farid";
    case ModelKind::first_reduced_vasylyev: return "first-reduced-vasylyev";
    case ModelKind::vasylyev: return "vasylyev";
    case ModelKind::point_approx: return "point-approx";
    case ModelKind::second_reduced_vasylyev: return "second-reduced-vasylyev";
  }
  return "unknown";
}

inline std::optional<ModelKind> parse_model_name(std::string_view name) {
  struct Alias {
    std::string_view name;
    ModelKind kind;
  };
  static constexpr Alias aliases[] = {
      {"intensity-uniform", ModelKind::intensity_uniform},
      {"iu", ModelKind::intensity_uniform},
      {"modified-iu", ModelKind::modified_intensity_uniform},
      {"modified-intensity-uniform", ModelKind::modified_intensity_uniform},
      {"linearized", ModelKind::linearized},
      {"farid", ModelKind::farid},
      {"first-reduced-vasylyev", ModelKind::first_reduced_vasylyev},
      {"first-reduced", ModelKind::first_reduced_vasylyev},
      {"vasylyev", ModelKind::vasylyev},
      {"point-approx", ModelKind::point_approx},
      {"second-reduced-vasylyev", ModelKind::second_reduced_vasylyev},
      {"second-reduced", ModelKind::second_reduced_vasylyev},
  };
  for (const auto& a : aliases) {
    if (a.name == name) return a.kind;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// c1 exp(-c2 r^2) family

struct ExpFamilyParams {
  double c1;  // h_p at r = 0, in (0, 1]
  double c2;  // [1/m^2]
  ModelKind label;
};

inline double exp_family_eval(const ExpFamilyParams& p, double r) {
  detail::require_non_negative(r, "r");
  return p.c1 * std::exp(-p.c2 * r * r);
}

namespace detail {

inline void check_beam(double wz, double ra) {
  require_positive(wz, "wz");
  require_positive(ra, "ra");
}

// 1 - exp(-2 ra^2 / wz^2)
inline double collected_fraction(double wz, double ra) { return -std::expm1(-2.0 * ra * ra / (wz * wz)); }

}  // namespace detail

/// Uniform intensity over the aperture equal to the beam intensity at its center.
/// Throws domain_error when c1 = 2 ra^2 / wz^2 exceeds 1.
inline ExpFamilyParams intensity_uniform_params(double wz, double ra) {
  detail::check_beam(wz, ra);
  const double c1 = 2.0 * ra * ra / (wz * wz);
  if (c1 > 1.0) {
    throw domain_error("intensity-uniform model invalid: c1 = 2 ra^2/wz^2 = " + std::to_string(c1) +
                       " > 1 (wz/ra too small)");
  }
  return {c1, 2.0 / (wz * wz), ModelKind::intensity_uniform};
}

/// eta exp(-eta r^2 / ra^2) with eta = 1 - exp(-2 ra^2 / wz^2).
inline ExpFamilyParams modified_intensity_uniform_params(double wz, double ra) {
  detail::check_beam(wz, ra);
  const double eta = detail::collected_fraction(wz, ra);
  return {eta, eta / (ra * ra), ModelKind::modified_intensity_uniform};
}

/// Farid's equivalent-beam-width model, A0 exp(-2 r^2 / wz_eq^2).
inline ExpFamilyParams farid_params(double wz, double ra) {
  detail::check_beam(wz, ra);
  const double v = std::sqrt(std::numbers::pi) * ra / (std::numbers::sqrt2 * wz);
  const double erf_v = std::erf(v);
  // 2 / wz_eq^2 with wz_eq^2 = wz^2 sqrt(pi) erf(v) / (2 v exp(-v^2))
  const double c2 = 4.0 * v * std::exp(-v * v) / (wz * wz * std::sqrt(std::numbers::pi) * erf_v);
  return {erf_v * erf_v, c2, ModelKind::farid};
}

inline ExpFamilyParams first_reduced_vasylyev_params(double wz, double ra) {
  detail::check_beam(wz, ra);
  return {detail::collected_fraction(wz, ra), 2.0 / (wz * wz), ModelKind::first_reduced_vasylyev};
}

// ---------------------------------------------------------------------------
// Linearized model

struct LinearizedSpec {
  int n = 4;        // number of equal-width splits of the equivalent square
  double r0 = 0.0;  // calibration displacement [m]

  void validate() const {
    if (n < 2) throw domain_error("linearized model needs n >= 2 splits");
    detail::require_positive(r0, "r0");
  }
};

/// Power collected by the equal-area square when the beam sits at r0, with the
/// intensity profile along x replaced by its chord on each of the n strips.
/// Each strip contributes (l/2) delta (k delta + 2 k x_i + 2 b), the exact
/// integral of k x + b over [x_i, x_i + delta] times the square's side l.
inline double linearized_collected_power(double wz, double ra, const LinearizedSpec& spec) {
  detail::check_beam(wz, ra);
  spec.validate();
  const double side = std::sqrt(std::numbers::pi * ra * ra);
  const double half_side = std::sqrt(std::numbers::pi * ra * ra / 4.0);
  const double delta = side / spec.n;
  const double start = spec.r0 - side / 2.0;
  auto intensity = [wz](double x) {
    return 2.0 / (std::numbers::pi * wz * wz) * std::exp(-2.0 * x * x / (wz * wz));
  };
  double q = 0.0;
  for (int i = 0; i < spec.n; ++i) {
    const double xi = start + delta * i;
    const double slope = (intensity(start + delta * (i + 1)) - intensity(xi)) / delta;
    const double offset = intensity(xi) - slope * xi;
    q += half_side * delta * (slope * delta + 2.0 * slope * xi + 2.0 * offset);
  }
  return q;
}

/// c1 = 1 - exp(-2 ra^2/wz^2); c2 = -ln(Q / c1) / r0^2 where Q is the linearized
/// collected power at r0. Throws calibration_error unless 0 < Q < c1.
inline ExpFamilyParams linearized_params(double wz, double ra, const LinearizedSpec& spec) {
  const double q = linearized_collected_power(wz, ra, spec);
  const double c1 = detail::collected_fraction(wz, ra);
  if (!(q > 0.0 && q < c1)) {
    throw calibration_error("linearized model: r0 = " + std::to_string(spec.r0) +
                            " gives collected power outside (0, c1)");
  }
  return {c1, -std::log(q / c1) / (spec.r0 * spec.r0), ModelKind::linearized};
}

/// Empirical optimum r0*/ra as a quadratic in wz/ra, for the split counts where
/// a fit is known (4 and 6). Lets the linearized model run without an optimizer.
inline std::optional<double> fitted_r0_over_ra(double wz_over_ra, int n) {
  const double x = wz_over_ra;
  if (n == 4) return 0.72 * x * x + 0.08 * x + 1.01;
  if (n == 6) return 0.52 * x * x + 0.30 * x + 0.93;
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Vasylyev family: eta exp(-(r/R)^lambda)

struct VasylyevParams {
  double eta;
  double lambda;
  double r_scale;  // R [m]
};

inline double vasylyev_eval(const VasylyevParams& p, double r) {
  detail::require_non_negative(r, "r");
  return p.eta * std::exp(-std::pow(r / p.r_scale, p.lambda));
}

/// Full Vasylyev shape and scale, evaluated with scaled Bessel functions so
/// that x = 4 ra^2 / wz^2 may be arbitrarily large.
inline VasylyevParams vasylyev_full_params(double wz, double ra) {
  detail::check_beam(wz, ra);
  const double eta = detail::collected_fraction(wz, ra);
  const double x = 4.0 * ra * ra / (wz * wz);
  if (x < 1e-300) return {eta, 2.0, wz / 2.0};
  // g = 1 - e^{-x} I0(x);  2 eta - g = (1 - e^{-x/2})^2 + e^{-x}(I0(x) - 1)
  const double e0 = std::expm1(-x);
  const double i0m1 = special::bessel_i0m1e(x);
  const double g = -e0 - i0m1;
  const double half = std::expm1(-0.5 * x);
  const double excess = half * half + i0m1;
  const double log_term = std::log1p(excess / g);  // ln(2 eta / g)
  const double lambda = 2.0 * x * special::bessel_i1e(x) / g / log_term;
  const double r_scale = ra * std::pow(log_term, -1.0 / lambda);
  return {eta, lambda, r_scale};
}

/// Narrow-beam limit of the Vasylyev model: eta = 1, lambda = 2 sqrt(2) ra / (sqrt(pi) wz ln 2),
/// R = ra ln(2)^(-1/lambda).
inline VasylyevParams second_reduced_vasylyev_params(double wz, double ra) {
  detail::check_beam(wz, ra);
  const double lambda = 2.0 * std::numbers::sqrt2 * ra / (std::sqrt(std::numbers::pi) * wz * std::numbers::ln2);
  return {1.0, lambda, ra * std::pow(std::numbers::ln2, -1.0 / lambda)};
}

/// 2^{-(r/ra)^lambda}; identical to vasylyev_eval on second-reduced parameters,
/// but exactly 1/2 at r = ra.
inline double second_reduced_eval(double lambda, double ra, double r) {
  detail::require_non_negative(r, "r");
  return std::exp2(-std::pow(r / ra, lambda));
}

// ---------------------------------------------------------------------------
// Logistic point approximation

enum class AlphaMode {
  asymptotic,    // alpha = 2 sqrt(2) ra / (sqrt(pi) k wz)
  exact_bessel,  // alpha = (8 ra^2 / (k wz^2)) e^{-x} I1(x), x = 4 ra^2 / wz^2
};

struct PointApproxParams {
  double alpha;
  int k;
  double ra;
};

inline PointApproxParams point_approx_params(double wz, double ra, int k = 1, AlphaMode mode = AlphaMode::asymptotic) {
  detail::check_beam(wz, ra);
  if (k < 1) throw domain_error("point approximation needs k >= 1");
  double alpha = 0.0;
  if (mode == AlphaMode::asymptotic) {
    alpha = 2.0 * std::numbers::sqrt2 * ra / (std::sqrt(std::numbers::pi) * k * wz);
  } else {
    const double x = 4.0 * ra * ra / (wz * wz);
    alpha = 2.0 * x / k * special::bessel_i1e(x);
  }
  return {alpha, k, ra};
}

/// 1 - 1/(1 + exp(-alpha((r/ra)^{2k} - 1))), branching on the exponent sign.
inline double point_approx_eval(const PointApproxParams& p, double r) {
  detail::require_non_negative(r, "r");
  const double t = p.alpha * (std::pow(r / p.ra, 2 * p.k) - 1.0);
  if (t > 0.0) {
    const double e = std::exp(-t);
    return e / (1.0 + e);
  }
  return 1.0 / (1.0 + std::exp(t));
}

// ---------------------------------------------------------------------------
// Uniform handle over all models

struct ModelOptions {
  int splits = 4;                 // linearized
  std::optional<double> r0;       // linearized; falls back to the fitted quadratic
  int k = 1;                      // point approximation
  AlphaMode alpha_mode = AlphaMode::asymptotic;
};

struct SecondReducedParams {
  double lambda;
  double ra;
};

class PointingModel {
public:
  using Params = std::variant<ExpFamilyParams, VasylyevParams, PointApproxParams, SecondReducedParams>;

  PointingModel(ModelKind kind, Params params) : kind_(kind), params_(params) {}

  ModelKind kind() const { return kind_; }
  const Params& params() const { return params_; }

  double operator()(double r) const {
    return std::visit(
        [r](const auto& p) -> double {
          using T = std::decay_t<decltype(p)>;
          if constexpr (std::is_same_v<T, ExpFamilyParams>) return exp_family_eval(p, r);
          else if constexpr (std::is_same_v<T, VasylyevParams>) return vasylyev_eval(p, r);
          else if constexpr (std::is_same_v<T, PointApproxParams>) return point_approx_eval(p, r);
          else return second_reduced_eval(p.lambda, p.ra, r);
        },
        params_);
  }

private:
  ModelKind kind_;
  Params params_;
};

inline PointingModel make_model(ModelKind kind, double wz, double ra, const ModelOptions& opts = {}) {
  switch (kind) {
    case ModelKind::intensity_uniform: return {kind, intensity_uniform_params(wz, ra)};
    case ModelKind::modified_intensity_uniform: return {kind, modified_intensity_uniform_params(wz, ra)};
    case ModelKind::farid: return {kind, farid_params(wz, ra)};
    case ModelKind::first_reduced_vasylyev: return {kind, first_reduced_vasylyev_params(wz, ra)};
    case ModelKind::vasylyev: return {kind, vasylyev_full_params(wz, ra)};
    case ModelKind::linearized: {
      double r0 = 0.0;
      if (opts.r0) {
        r0 = *opts.r0;
      } else if (auto fitted = fitted_r0_over_ra(wz / ra, opts.splits)) {
        r0 = *fitted * ra;
      } else {
        throw domain_error("linearized model with n = " + std::to_string(opts.splits) + " needs an explicit r0");
      }
      return {kind, linearized_params(wz, ra, LinearizedSpec{opts.splits, r0})};
    }
    case ModelKind::point_approx: return {kind, point_approx_params(wz, ra, opts.k, opts.alpha_mode)};
    case ModelKind::second_reduced_vasylyev: {
      const VasylyevParams p = second_reduced_vasylyev_params(wz, ra);
      return {kind, SecondReducedParams{p.lambda, ra}};
    }
  }
  throw domain_error("unknown model kind");
}

}  // namespace fsopoint
