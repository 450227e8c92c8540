#pragma once

// Analytic conic oracle r(theta) = e d / (1 + e cos theta) for two-body and
// reduced three-body trajectories. mu_eff is the coefficient of -r/|r|^3 in
// the Kepler-type equation being checked, e.g. G (m1 + m2) for the relative
// two-body problem or G (m1 + m3/4) for the antipodal three-body reduction.

#include <cstddef>
#include <span>
#include <vector>

#include "relnbody/integrate.hpp"
#include "relnbody/vec3.hpp"

namespace relnbody {

/// Below this eccentricity an orbit is treated as circular and d is the
/// circular radius (the literal formula degenerates to r = 0 at e = 0).
inline constexpr double kCircularEccentricity = 1e-9;

struct ConicParams {
  double e = 0.0;       // eccentricity
  double d = 0.0;       // conic scale; e*d is the semi-latus rectum
  double mu_eff = 0.0;
  Vec3 periapsis_dir;   // in-plane basis vector, theta = 0
  Vec3 normal_dir;      // orbit normal; second basis vector is normal x periapsis

  /// e*d, or d itself for circular orbits.
  double semi_latus_rectum() const { return e < kCircularEccentricity ? d : e * d; }
};

/// Throws std::domain_error where 1 + e cos(theta) <= 0.
double conic_radius(const ConicParams& params, double theta);

struct OrbitSample {
  Vec3 position;
  Vec3 velocity;
};

struct ConicFit {
  ConicParams params;
  /// max over samples of | |r| - conic_radius(theta) | / semi_latus_rectum.
  /// Infinite when a sample sits at an angle the conic never reaches.
  double max_radial_residual = 0.0;
};

/// e and d from the energy and angular momentum of the first sample; the
/// residual is evaluated over every sample. Throws std::invalid_argument for
/// mu_eff <= 0 or fewer than one sample, and std::domain_error when samples
/// leave the orbital plane by more than 1e-6 of the orbit scale.
ConicFit fit_conic(std::span<const OrbitSample> samples, double mu_eff);

/// Position/velocity history of one trajectory entity (column group).
std::vector<OrbitSample> orbit_samples(const Trajectory& trajectory, std::size_t entity);

}  // namespace relnbody
