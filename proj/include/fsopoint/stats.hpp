#pragma once

// Rayleigh pointing jitter and the induced distributions of h_p.
//
// Each law exposes its density on h and, for numerics, the same density in
// the logit coordinate u = ln(h / (1 - h)) (Jacobian h (1 - h) included).
// The logit form is smooth at both ends of the support, which is what the
// normalization checks and the tabulated CDF integrate.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <span>
#include <thread>
#include <vector>

#include "fsopoint/errors.hpp"
#include "fsopoint/quadrature.hpp"

namespace fsopoint {

struct JitterSpec {
  double sigma_s;

  explicit JitterSpec(double s) : sigma_s(s) { detail::require_positive(sigma_s, "sigma_s"); }
};

inline double rayleigh_pdf(double r, double sigma_s) {
  detail::require_positive(sigma_s, "sigma_s");
  detail::require_non_negative(r, "r");
  const double s2 = sigma_s * sigma_s;
  return r / s2 * std::exp(-r * r / (2.0 * s2));
}

namespace detail {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// ln(1 / (1 + e^{-u})), stable for either sign of u.
inline double log_sigmoid(double u) { return u >= 0.0 ? -std::log1p(std::exp(-u)) : u - std::log1p(std::exp(u)); }

inline double logit(double h) {
  if (h <= 0.0) return -std::numeric_limits<double>::infinity();
  if (h >= 1.0) return std::numeric_limits<double>::infinity();
  return std::log(h) - std::log1p(-h);
}

inline void require_open_unit(double h) {
  if (!(h > 0.0 && h < 1.0)) throw domain_error("h_p must lie in (0, 1)");
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Laws of h_p under Rayleigh jitter

/// h = c1 exp(-c2 r^2): power law gamma^2 / c1^{gamma^2} h^{gamma^2 - 1} on (0, c1],
/// gamma^2 = 1 / (2 sigma_s^2 c2).
struct ExpFamilyHpLaw {
  double c1;
  double c2;
  double sigma_s;

  double gamma2() const { return 1.0 / (2.0 * sigma_s * sigma_s * c2); }

  double pdf(double h) const {
    if (!(h > 0.0 && h <= c1)) return 0.0;
    const double g2 = gamma2();
    return std::exp(std::log(g2) - g2 * std::log(c1) + (g2 - 1.0) * std::log(h));
  }

  double log_logit_density(double u) const {
    if (u > upper_logit()) return detail::kNegInf;
    const double g2 = gamma2();
    return std::log(g2) - g2 * std::log(c1) + g2 * detail::log_sigmoid(u) + detail::log_sigmoid(-u);
  }

  double upper_logit() const { return detail::logit(c1); }
};

/// Logistic point approximation with k = 1:
/// (ra^2 / (2 sigma_s^2 alpha)) [h / (c (1 - h))]^{ra^2 / (2 alpha sigma_s^2)} / (h (1 - h)), c = e^alpha,
/// supported on (0, h(r = 0)] = (0, 1 / (1 + e^{-alpha})].
struct PointApproxHpLaw {
  double ra;
  double sigma_s;
  double alpha;

  double beta() const { return ra * ra / (2.0 * alpha * sigma_s * sigma_s); }

  double pdf(double h) const {
    detail::require_open_unit(h);
    const double u = detail::logit(h);
    if (u > upper_logit()) return 0.0;
    const double b = beta();
    return std::exp(std::log(b) + b * (u - alpha) - std::log(h) - std::log1p(-h));
  }

  double log_logit_density(double u) const {
    if (u > upper_logit()) return detail::kNegInf;
    const double b = beta();
    return std::log(b) + b * (u - alpha);
  }

  double upper_logit() const { return alpha; }
};

/// Second reduced Vasylyev model h = 2^{-(r/ra)^lambda} on (0, 1).
struct SecondReducedHpLaw {
  double ra;
  double sigma_s;
  double lambda;

  double pdf(double h) const {
    detail::require_open_unit(h);
    const double log_inv_h = -std::log(h);
    return std::exp(log_density_core(log_inv_h) - std::log(h));
  }

  double log_logit_density(double u) const {
    const double log_inv_h = -detail::log_sigmoid(u);
    if (!(log_inv_h > 0.0)) return detail::kNegInf;
    // f(h) h (1 - h) with h (1 - h) / h = 1 - h = sigmoid(-u)
    return log_density_core(log_inv_h) + detail::log_sigmoid(-u);
  }

  double upper_logit() const { return std::numeric_limits<double>::infinity(); }

private:
  // ln of  ra^2 / (ln2^{2/lambda} sigma_s^2 lambda) exp[-(ra^2/(2 sigma_s^2)) (L/ln2)^{2/lambda}] L^{2/lambda - 1},
  // with L = ln(1/h).
  double log_density_core(double log_inv_h) const {
    const double s2 = sigma_s * sigma_s;
    const double p = 2.0 / lambda;
    const double ln2 = std::numbers::ln2;
    return std::log(ra * ra / (s2 * lambda)) - p * std::log(ln2) -
           ra * ra / (2.0 * s2) * std::pow(log_inv_h / ln2, p) + (p - 1.0) * std::log(log_inv_h);
  }
};

/// Unified power-law PDF of h_p for any c1 exp(-c2 r^2) model; zero outside (0, c1].
inline double hp_pdf_exp_family(double hp, double c1, double c2, double sigma_s) {
  detail::require_positive(sigma_s, "sigma_s");
  detail::require_positive(c2, "c2");
  if (!(c1 > 0.0 && c1 <= 1.0)) throw domain_error("c1 must lie in (0, 1]");
  return ExpFamilyHpLaw{c1, c2, sigma_s}.pdf(hp);
}

inline double hp_pdf_point_approx(double hp, double ra, double sigma_s, double alpha) {
  detail::require_positive(ra, "ra");
  detail::require_positive(sigma_s, "sigma_s");
  detail::require_positive(alpha, "alpha");
  return PointApproxHpLaw{ra, sigma_s, alpha}.pdf(hp);
}

inline double hp_pdf_second_reduced(double hp, double ra, double sigma_s, double lambda) {
  detail::require_positive(ra, "ra");
  detail::require_positive(sigma_s, "sigma_s");
  detail::require_positive(lambda, "lambda");
  return SecondReducedHpLaw{ra, sigma_s, lambda}.pdf(hp);
}

// ---------------------------------------------------------------------------
// Numerical CDF in the logit coordinate

namespace detail {

// Maps t -> u = center + scale sinh(t): fine resolution across the bulk,
// exponentially growing reach into the tails.
struct SinhMap {
  double center;
  double scale;
  double u(double t) const { return center + scale * std::sinh(t); }
  double du_dt(double t) const { return scale * std::cosh(t); }
  double t(double u) const { return std::asinh((u - center) / scale); }
};

struct LogitFrame {
  SinhMap map;
  double t_lo;
  double t_hi;
};

// Locates the mode of a law's logit density and its width, then the t-range
// outside of which the remaining mass is negligible (< ~1e-16).
template <class Law>
LogitFrame logit_frame(const Law& law) {
  const double top = law.upper_logit();
  const double scan_hi = std::isfinite(top) ? top : 60.0;
  auto f = [&](double u) { return law.log_logit_density(u); };

  constexpr int kScan = 4000;
  constexpr double kStep = 0.25;
  double center = scan_hi;
  double best = kNegInf;
  for (int i = 0; i <= kScan; ++i) {
    const double u = scan_hi - kStep * i;
    const double v = f(u);
    if (v > best) {
      best = v;
      center = u;
    }
  }
  if (!std::isfinite(best)) throw domain_error("law has no mass in the scanned logit range");
  // Golden refinement of the mode within one scan step.
  {
    double lo = center - kStep;
    double hi = std::min(center + kStep, scan_hi);
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    for (int it = 0; it < 80 && hi - lo > 1e-12 * (1.0 + std::abs(center)); ++it) {
      const double a = hi - inv_phi * (hi - lo);
      const double b = lo + inv_phi * (hi - lo);
      if (f(a) >= f(b)) hi = b; else lo = a;
    }
    const double c = 0.5 * (lo + hi);
    if (f(c) > best) {
      best = f(c);
      center = c;
    }
  }
  // Width: distance at which the log-density has dropped by one.
  auto drop_distance = [&](double dir) {
    double near = 0.0;
    double far = 1e-9;
    while (far < 1e4) {
      if (dir > 0 && center + far >= scan_hi) return std::numeric_limits<double>::infinity();
      if (!(f(center + dir * far) > best - 1.0)) break;
      near = far;
      far *= 2.0;
    }
    for (int it = 0; it < 60; ++it) {
      const double mid = 0.5 * (near + far);
      if (f(center + dir * mid) > best - 1.0) near = mid; else far = mid;
    }
    return far;
  };
  const double scale = std::clamp(std::min(drop_distance(-1.0), drop_distance(1.0)), 1e-8, 10.0);

  auto negligible = [&](double u) { return f(u) + std::log(1.0 + std::abs(u - center)) < std::log(1e-18); };
  const SinhMap map{center, scale};
  double t_lo = -1.0;
  while (t_lo > -60.0 && !negligible(map.u(t_lo))) t_lo -= 0.5;
  double t_hi;
  if (std::isfinite(top)) {
    t_hi = map.t(top);
  } else {
    t_hi = 1.0;
    while (t_hi < 60.0 && !negligible(map.u(t_hi))) t_hi += 0.5;
  }
  if (!(t_hi > t_lo)) t_hi = t_lo + 1.0;
  return {map, t_lo, t_hi};
}

}  // namespace detail

/// Total probability of a law, by adaptive quadrature of its logit density.
template <class Law>
double total_mass(const Law& law, const QuadratureSpec& spec = {1e-12, 1e-14, 2000}) {
  const auto frame = detail::logit_frame(law);
  auto integrand = [&](double t) {
    const double u = frame.map.u(t);
    return std::exp(law.log_logit_density(u)) * frame.map.du_dt(t);
  };
  return integrate_or_throw(integrand, frame.t_lo, frame.t_hi, spec, "total_mass");
}

/// CDF of h_p tabulated on `nodes` points (uniform in t of the sinh-stretched
/// logit coordinate), cumulated cell by cell with adaptive quadrature and
/// linearly interpolated in between.
class TabulatedCdf {
public:
  template <class Law>
  static TabulatedCdf build(const Law& law, int nodes = 10000) {
    if (nodes < 2) throw domain_error("CDF table needs at least 2 nodes");
    const auto frame = detail::logit_frame(law);
    TabulatedCdf out;
    out.u_.resize(static_cast<std::size_t>(nodes));
    out.cdf_.resize(static_cast<std::size_t>(nodes));
    auto integrand = [&](double t) {
      return std::exp(law.log_logit_density(frame.map.u(t))) * frame.map.du_dt(t);
    };
    const QuadratureSpec cell_spec{1e-10, 1e-16, 200};
    double acc = 0.0;
    double t_prev = frame.t_lo;
    for (int i = 0; i < nodes; ++i) {
      const double t = frame.t_lo + (frame.t_hi - frame.t_lo) * i / (nodes - 1);
      if (i > 0) acc += integrate_or_throw(integrand, t_prev, t, cell_spec, "TabulatedCdf cell");
      out.u_[i] = frame.map.u(t);
      out.cdf_[i] = acc;
      t_prev = t;
    }
    out.mass_ = acc;
    return out;
  }

  /// F(h), h in [0, 1]; h outside the table range maps to 0 or 1.
  double operator()(double h) const { return at_logit(detail::logit(h)); }

  double at_logit(double u) const {
    if (!(u > u_.front())) return 0.0;
    if (!(u < u_.back())) return std::min(1.0, cdf_.back());
    const auto it = std::upper_bound(u_.begin(), u_.end(), u);
    const std::size_t j = static_cast<std::size_t>(it - u_.begin());
    const double w = (u - u_[j - 1]) / (u_[j] - u_[j - 1]);
    return cdf_[j - 1] + w * (cdf_[j] - cdf_[j - 1]);
  }

  double mass() const { return mass_; }
  std::size_t size() const { return u_.size(); }

private:
  double mass_ = 0.0;
  std::vector<double> u_;
  std::vector<double> cdf_;
};

namespace detail {

// Logit of the midpoint of two adjacent doubles lo < hi in [0, 1], without
// forming the (often unrepresentable) midpoint itself.
inline double midpoint_logit(double lo, double hi) {
  const double half_gap = 0.5 * (hi - lo);
  const double log_m = std::log(hi) + std::log1p(-half_gap / hi);
  return log_m - std::log((1.0 - hi) + half_gap);
}

}  // namespace detail

/// Kolmogorov-Smirnov distance between a sample of h_p and a tabulated CDF.
/// Each sample value stands for the cell of reals that round to it, so values
/// that collapse onto 0 or 1 (or any other double) are compared as tied blocks
/// against the law's mass in that cell. Evaluation is in the logit coordinate.
inline double ks_distance(std::span<const double> samples, const TabulatedCdf& cdf) {
  if (samples.empty()) throw domain_error("ks_distance: empty sample");
  std::vector<double> h(samples.begin(), samples.end());
  for (double v : h) {
    if (!(v >= 0.0 && v <= 1.0)) throw domain_error("ks_distance: samples must lie in [0, 1]");
  }
  std::sort(h.begin(), h.end());
  const double n = static_cast<double>(h.size());
  double d = 0.0;
  for (std::size_t i0 = 0; i0 < h.size();) {
    const double v = h[i0];
    std::size_t i1 = i0;
    while (i1 < h.size() && h[i1] == v) ++i1;
    const double f_lo = v > 0.0 ? cdf.at_logit(detail::midpoint_logit(std::nextafter(v, 0.0), v)) : 0.0;
    const double f_hi = v < 1.0 ? cdf.at_logit(detail::midpoint_logit(v, std::nextafter(v, 1.0))) : 1.0;
    d = std::max({d, f_lo - static_cast<double>(i0) / n, static_cast<double>(i1) / n - f_hi});
    i0 = i1;
  }
  return d;
}

// ---------------------------------------------------------------------------
// Sampling

namespace detail {

inline constexpr std::size_t kChunk = std::size_t{1} << 16;

inline std::mt19937_64 chunk_engine(std::uint64_t seed, std::size_t chunk) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(chunk), static_cast<std::uint32_t>(chunk >> 32)};
  return std::mt19937_64(seq);
}

// Uniform on [0, 1) from the top 53 bits.
inline double unit_uniform(std::mt19937_64& eng) { return static_cast<double>(eng() >> 11) * 0x1.0p-53; }

// Runs body(chunk_index, begin, end) for every chunk, spread over `threads` workers.
template <class Body>
void for_each_chunk(std::size_t count, unsigned threads, Body body) {
  const std::size_t chunks = (count + kChunk - 1) / kChunk;
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(chunks)));
  auto worker = [&](unsigned w) {
    for (std::size_t c = w; c < chunks; c += threads) {
      body(c, c * kChunk, std::min(count, (c + 1) * kChunk));
    }
  };
  if (threads == 1) {
    worker(0);
    return;
  }
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < threads; ++w) pool.emplace_back(worker, w);
  for (auto& t : pool) t.join();
}

}  // namespace detail

/// Rayleigh radii by inverse transform r = sigma_s sqrt(-2 ln(1 - u)).
/// The stream depends only on (seed, count), never on `threads`.
inline std::vector<double> rayleigh_sample(double sigma_s, std::uint64_t seed, std::size_t count,
                                           unsigned threads = 1) {
  detail::require_positive(sigma_s, "sigma_s");
  if (count < 1) throw domain_error("rayleigh_sample: count must be >= 1");
  std::vector<double> out(count);
  detail::for_each_chunk(count, threads, [&](std::size_t chunk, std::size_t begin, std::size_t end) {
    auto eng = detail::chunk_engine(seed, chunk);
    for (std::size_t i = begin; i < end; ++i) {
      out[i] = sigma_s * std::sqrt(-2.0 * std::log1p(-detail::unit_uniform(eng)));
    }
  });
  return out;
}

/// model(r) for Rayleigh-distributed r; same determinism guarantee as rayleigh_sample.
template <class Model>
std::vector<double> monte_carlo_hp_samples(const Model& model, double sigma_s, std::size_t count,
                                           std::uint64_t seed, unsigned threads = 1) {
  std::vector<double> r = rayleigh_sample(sigma_s, seed, count, threads);
  detail::for_each_chunk(count, threads, [&](std::size_t, std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) r[i] = model(r[i]);
  });
  return r;
}

/// Equal-width bins over [0, 1]; bin_edges has bins + 1 entries.
struct Histogram {
  std::vector<double> bin_edges;
  std::vector<std::uint64_t> counts;
  std::uint64_t total = 0;

  double density(std::size_t bin) const {
    const double width = bin_edges[bin + 1] - bin_edges[bin];
    return static_cast<double>(counts[bin]) / (static_cast<double>(total) * width);
  }
};

/// h = 1 (r = 0 on a model with c1 = 1) lands in the last bin; an h that
/// underflowed to 0 lands in the first.
inline std::size_t hist_bin(double h, std::size_t bins) {
  if (!(h > 0.0)) return 0;
  const auto b = static_cast<std::size_t>(h * static_cast<double>(bins));
  return std::min(b, bins - 1);
}

template <class Model>
Histogram monte_carlo_hp_hist(const Model& model, double sigma_s, std::size_t count, std::size_t bins,
                              std::uint64_t seed, unsigned threads = 1) {
  if (count < 1) throw domain_error("monte_carlo_hp_hist: count must be >= 1");
  if (bins < 1) throw domain_error("monte_carlo_hp_hist: bins must be >= 1");
  Histogram hist;
  hist.bin_edges.resize(bins + 1);
  for (std::size_t i = 0; i <= bins; ++i) hist.bin_edges[i] = static_cast<double>(i) / static_cast<double>(bins);
  hist.counts.assign(bins, 0);
  hist.total = count;
  const std::vector<double> h = monte_carlo_hp_samples(model, sigma_s, count, seed, threads);
  for (double v : h) ++hist.counts[hist_bin(v, bins)];
  return hist;
}

}  // namespace fsopoint
