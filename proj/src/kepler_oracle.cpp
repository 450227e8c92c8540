#include "relnbody/kepler_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace relnbody {

double conic_radius(const ConicParams& params, double theta) {
  const double denom = 1.0 + params.e * std::cos(theta);
  if (!(denom > 0.0)) throw std::domain_error("conic_radius: angle outside the admissible range");
  return params.semi_latus_rectum() / denom;
}

ConicFit fit_conic(std::span<const OrbitSample> samples, double mu_eff) {
  if (!(mu_eff > 0.0)) throw std::invalid_argument("fit_conic: mu_eff must be positive");
  if (samples.empty()) throw std::invalid_argument("fit_conic: no samples");

  const Vec3 r0 = samples.front().position;
  const Vec3 v0 = samples.front().velocity;
  const Vec3 h = cross(r0, v0);
  const double hn = norm(h);
  if (hn == 0.0) throw std::domain_error("fit_conic: radial orbit has no plane");

  const double energy = 0.5 * norm2(v0) - mu_eff / norm(r0);
  const double e = std::sqrt(std::max(0.0, 1.0 + 2.0 * energy * hn * hn / (mu_eff * mu_eff)));
  const double p = hn * hn / mu_eff;

  ConicFit fit;
  fit.params.mu_eff = mu_eff;
  fit.params.e = e;
  fit.params.d = e < kCircularEccentricity ? p : p / e;
  fit.params.normal_dir = h / hn;
  const Vec3 ecc_vec = cross(v0, h) / mu_eff - r0 / norm(r0);
  fit.params.periapsis_dir = e < kCircularEccentricity || norm(ecc_vec) == 0.0 ? r0 / norm(r0) : ecc_vec / norm(ecc_vec);
  const Vec3 q = cross(fit.params.normal_dir, fit.params.periapsis_dir);

  double scale = 0.0;
  for (const auto& s : samples) scale = std::max(scale, norm(s.position));
  for (const auto& s : samples) {
    if (std::abs(dot(s.position, fit.params.normal_dir)) > 1e-6 * scale) {
      throw std::domain_error("fit_conic: samples are not coplanar");
    }
  }

  for (const auto& s : samples) {
    const double theta = std::atan2(dot(s.position, q), dot(s.position, fit.params.periapsis_dir));
    // A sample at an angle the conic never reaches cannot be described by it.
    if (!(1.0 + e * std::cos(theta) > 0.0)) {
      fit.max_radial_residual = std::numeric_limits<double>::infinity();
      continue;
    }
    const double predicted = conic_radius(fit.params, theta);
    fit.max_radial_residual = std::max(fit.max_radial_residual, std::abs(norm(s.position) - predicted) / p);
  }
  return fit;
}

std::vector<OrbitSample> orbit_samples(const Trajectory& trajectory, std::size_t entity) {
  if (entity >= trajectory.entity_count()) throw std::out_of_range("orbit_samples: entity out of range");
  std::vector<OrbitSample> out;
  out.reserve(trajectory.samples.size());
  for (std::size_t i = 0; i < trajectory.samples.size(); ++i) {
    out.push_back({trajectory.position(i, entity), trajectory.velocity(i, entity)});
  }
  return out;
}

}  // namespace relnbody
