#pragma once

// Gaussian beam propagation and link geometry. Everything downstream depends
// only on the pair (wz, ra); physical units live here and nowhere else.

#include <cmath>
#include <numbers>
#include <optional>

#include "fsopoint/errors.hpp"

namespace fsopoint {

/// Spherical-wave atmospheric coherence length (0.55 Cn^2 k^2 z)^(-3/5), k = 2 pi / wavelength.
inline double coherence_length_spherical(double cn2, double wavelength, double z) {
  detail::require_positive(cn2, "cn2");
  detail::require_positive(wavelength, "wavelength");
  detail::require_positive(z, "z");
  const double k = 2.0 * std::numbers::pi / wavelength;
  return std::pow(0.55 * cn2 * k * k * z, -0.6);
}

/// Beam radius after propagating z. An absent rho0 means no turbulence (epsilon = 1).
/// z = 0 is accepted and returns w0 exactly.
inline double beam_radius_at(double w0, double wavelength, double z, std::optional<double> rho0 = std::nullopt) {
  detail::require_positive(w0, "w0");
  detail::require_positive(wavelength, "wavelength");
  detail::require_non_negative(z, "z");
  double epsilon = 1.0;
  if (rho0) {
    detail::require_positive(*rho0, "rho0");
    epsilon += 2.0 * w0 * w0 / (*rho0 * *rho0);
  }
  if (z == 0.0) return w0;
  const double spread = wavelength * z / (std::numbers::pi * w0 * w0);
  return w0 * std::sqrt(1.0 + epsilon * spread * spread);
}

/// Normalized Gaussian beam intensity at radial offset rho; integrates to 1 over the plane.
inline double beam_intensity(double rho, double wz) {
  detail::require_positive(wz, "wz");
  detail::require_non_negative(rho, "rho");
  return 2.0 / (std::numbers::pi * wz * wz) * std::exp(-2.0 * rho * rho / (wz * wz));
}

/// Link geometry reduced to what the pointing models need.
struct BeamGeometry {
  double wz;  // beam radius at the receiver [m]
  double ra;  // detection aperture radius [m]

  // Present only when wz was derived from transmitter parameters.
  struct Transmitter {
    double w0;
    double wavelength;
    double z;
    std::optional<double> cn2;
  };
  std::optional<Transmitter> transmitter;

  static BeamGeometry from_beam_radius(double wz, double ra) {
    detail::require_positive(wz, "wz");
    detail::require_positive(ra, "ra");
    return {wz, ra, std::nullopt};
  }

  static BeamGeometry from_transmitter(double w0, double wavelength, double z, std::optional<double> cn2,
                                       double ra) {
    detail::require_positive(z, "z");
    detail::require_positive(ra, "ra");
    std::optional<double> rho0;
    if (cn2) rho0 = coherence_length_spherical(*cn2, wavelength, z);
    const double wz = beam_radius_at(w0, wavelength, z, rho0);
    return {wz, ra, Transmitter{w0, wavelength, z, cn2}};
  }

  double wz_over_ra() const { return wz / ra; }
};

/// Dimensionless case; all reported results are functions of wz/ra and r/ra.
struct NormalizedCase {
  double wz_over_ra;
  double ra = 1.0;

  NormalizedCase(double ratio, double aperture = 1.0) : wz_over_ra(ratio), ra(aperture) {
    detail::require_positive(wz_over_ra, "wz_over_ra");
    detail::require_positive(ra, "ra");
  }

  BeamGeometry geometry() const { return BeamGeometry::from_beam_radius(wz_over_ra * ra, ra); }
};

}  // namespace fsopoint
