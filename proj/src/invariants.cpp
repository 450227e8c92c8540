#include "relnbody/invariants.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "relnbody/dynamics.hpp"
#include "relnbody/kernels.hpp"

namespace relnbody {

namespace {

double relative_residual(double lhs, double rhs) {
  return std::abs(lhs - rhs) / std::max(std::abs(rhs), kResidualFloor);
}

/// r_a - r_b for any ordered pair.
Vec3 signed_separation(const PairGeometry& g, int a, int b) {
  return a < b ? g.separation(a, b) : -g.separation(b, a);
}

double closed_form_rhs(const PairGeometry& g) {
  const std::size_t n = g.body_count();
  double sum = 0.0;
  std::size_t idx = 0;
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t k = j + 1; k < n; ++k, ++idx) sum += g.masses[j] * g.masses[k] / norm(g.separations[idx]);
  }
  return -g.G * g.total_mass() * sum;
}

IdentityCheck identity_from_fields(const PairGeometry& g, const std::vector<Vec3>& fields) {
  const std::size_t n = g.body_count();
  IdentityCheck out;
  std::size_t idx = 0;
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t k = j + 1; k < n; ++k, ++idx) {
      out.lhs += g.masses[j] * g.masses[k] * dot(g.separations[idx], fields[j] - fields[k]);
    }
  }
  out.rhs = closed_form_rhs(g);
  out.residual = relative_residual(out.lhs, out.rhs);
  return out;
}

TSumCheck t_sum_from_geometry(const PairGeometry& g) {
  const int n = static_cast<int>(g.body_count());
  const double M = g.total_mass();
  TSumCheck out;
  for (int j = 1; j <= n; ++j) {
    for (int k = j + 1; k <= n; ++k) {
      const Vec3 sjk = g.separation(j, k);
      const double mj = g.masses[static_cast<std::size_t>(j - 1)];
      const double mk = g.masses[static_cast<std::size_t>(k - 1)];
      double inner = 0.0;
      for (int i = 1; i <= n; ++i) {
        if (i == j || i == k) continue;
        const Vec3 rij = signed_separation(g, i, j);
        const Vec3 rik = signed_separation(g, i, k);
        const double dij = norm(rij);
        const double dik = norm(rik);
        inner += g.masses[static_cast<std::size_t>(i - 1)] *
                 (dot(sjk, rij) / (dij * dij * dij) - dot(sjk, rik) / (dik * dik * dik));
      }
      out.t_sum += g.G * mj * mk * inner;
      out.closed += -g.G * (M - mj - mk) * mj * mk / norm(sjk);
    }
  }
  out.residual = n < 3 ? 0.0 : relative_residual(out.t_sum, out.closed);
  return out;
}

Restlessness restlessness_from_fields(const PairGeometry& g, const std::vector<Vec3>& fields,
                                      std::optional<double> delta) {
  const std::size_t n = g.body_count();
  Restlessness out;
  out.identity_rhs = closed_form_rhs(g);
  out.delta = delta.value_or(default_restlessness_threshold(g));

  std::size_t idx = 0;
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t k = j + 1; k < n; ++k, ++idx) {
      const double rel_acc = norm(fields[j] - fields[k]);
      out.weighted_sum += g.masses[j] * g.masses[k] * norm(g.separations[idx]) * rel_acc;
      if (rel_acc > out.delta) out.restless_pairs.push_back({static_cast<int>(j + 1), static_cast<int>(k + 1)});
    }
  }
  for (const auto& f : fields) {
    if (norm(f) > out.delta) ++out.accelerating_bodies;
  }
  // Equality holds for collinear two-body data, so allow rounding at the 1e-12 level.
  out.bound_ok = out.weighted_sum >= std::abs(out.identity_rhs) * (1.0 - 1e-12);
  return out;
}

std::vector<Vec3> fields_of(const PairGeometry& g) { return kernels::pair_fields(g.masses, g.G, g.separations); }

void require_pairs(std::size_t n) {
  if (n < 2) throw std::invalid_argument("identity needs at least two bodies");
}

}  // namespace

IdentityCheck motion_identity(const NBodyState& state) {
  require_pairs(state.size());
  return identity_from_fields(pair_geometry(state), nbody_accelerations(state).values);
}

IdentityCheck motion_identity(const RelativeState& state) {
  const PairGeometry g = pair_geometry(state);
  return identity_from_fields(g, fields_of(g));
}

TSumCheck t_sum_check(const NBodyState& state) {
  require_pairs(state.size());
  return t_sum_from_geometry(pair_geometry(state));
}

TSumCheck t_sum_check(const RelativeState& state) { return t_sum_from_geometry(pair_geometry(state)); }

double pair_self_term(const PairGeometry& g) {
  const std::size_t n = g.body_count();
  double sum = 0.0;
  std::size_t idx = 0;
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t k = j + 1; k < n; ++k, ++idx) {
      sum += -g.G * g.masses[j] * g.masses[k] * (g.masses[j] + g.masses[k]) / norm(g.separations[idx]);
    }
  }
  return sum;
}

std::string_view to_string(Bcos3Verdict verdict) {
  switch (verdict) {
    case Bcos3Verdict::Consistent:
      return "Consistent";
    case Bcos3Verdict::InconsistentMassRatio:
      return "InconsistentMassRatio";
    case Bcos3Verdict::InconsistentGeometry:
      return "InconsistentGeometry";
  }
  return "unknown";
}

Bcos3Consistency bcos3_consistency_check(double m2, double m3, const Vec3& r2, const Vec3& r3) {
  if (!(m2 > 0.0) || !(m3 > 0.0)) throw std::invalid_argument("masses must be positive");
  const double d2 = norm(r2);
  const double d3 = norm(r3);
  if (d2 == 0.0 || d3 == 0.0) throw std::invalid_argument("r2 and r3 must be nonzero");

  Bcos3Consistency out;
  out.mass_mismatch = std::abs(m2 - m3) / std::max(m2, m3);
  out.geometry_mismatch = norm(r2 + std::sqrt(m2 / m3) * r3);
  out.geometry_tolerance = kBcosGeometryTolerance * std::max(d2, d3);
  out.constraint_residual = norm(m2 * r2 / (d2 * d2 * d2) + m3 * r3 / (d3 * d3 * d3));

  if (out.mass_mismatch > kBcosMassTolerance) {
    out.verdict = Bcos3Verdict::InconsistentMassRatio;
  } else if (out.geometry_mismatch > out.geometry_tolerance) {
    out.verdict = Bcos3Verdict::InconsistentGeometry;
  } else {
    out.verdict = Bcos3Verdict::Consistent;
  }
  return out;
}

double two_body_bcos_contradiction(double m2, const Vec3& r2, double G) {
  const double d = norm(r2);
  if (d == 0.0) throw std::invalid_argument("r2 must be nonzero");
  return G * m2 / (d * d);
}

double default_restlessness_threshold(const PairGeometry& g) {
  const std::size_t n = g.body_count();
  const std::size_t pairs = pair_count(n);
  if (pairs == 0) return 0.0;
  double max_weight = 0.0;
  std::size_t idx = 0;
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t k = j + 1; k < n; ++k, ++idx) {
      max_weight = std::max(max_weight, g.masses[j] * g.masses[k] * norm(g.separations[idx]));
    }
  }
  return std::abs(closed_form_rhs(g)) / (2.0 * static_cast<double>(pairs) * max_weight);
}

Restlessness restlessness_check(const NBodyState& state, std::optional<double> delta) {
  require_pairs(state.size());
  return restlessness_from_fields(pair_geometry(state), nbody_accelerations(state).values, delta);
}

Restlessness restlessness_check(const RelativeState& state, std::optional<double> delta) {
  const PairGeometry g = pair_geometry(state);
  return restlessness_from_fields(g, fields_of(g), delta);
}

double translation_invariance_residual(const NBodyState& state, const Vec3& shift) {
  const NBodyState moved = state.translated(shift);
  double worst = 0.0;
  auto compare = [&worst](const AccelerationSet& base, const AccelerationSet& other) {
    for (std::size_t i = 0; i < base.values.size(); ++i) {
      worst = std::max(worst, norm(other.values[i] - base.values[i]) / std::max(1.0, norm(base.values[i])));
    }
  };
  compare(rs1_rhs(to_relative(state, RelativeMode::RS1)), rs1_rhs(to_relative(moved, RelativeMode::RS1)));
  compare(rs2_rhs(to_relative(state, RelativeMode::RS2)), rs2_rhs(to_relative(moved, RelativeMode::RS2)));
  return worst;
}

double relative_energy(const PairGeometry& g) {
  const std::size_t n = g.body_count();
  const double M = g.total_mass();
  double kinetic = 0.0;
  double potential = 0.0;
  std::size_t idx = 0;
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t k = j + 1; k < n; ++k, ++idx) {
      const double mm = g.masses[j] * g.masses[k];
      kinetic += mm * norm2(g.relative_velocities[idx]);
      potential += mm / norm(g.separations[idx]);
    }
  }
  return kinetic / (2.0 * M) - g.G * potential;
}

namespace {

InvariantReport assemble(double time, const PairGeometry& g, const std::vector<Vec3>& fields) {
  InvariantReport report;
  report.time = time;
  const IdentityCheck id = identity_from_fields(g, fields);
  report.identity_lhs = id.lhs;
  report.identity_rhs = id.rhs;
  report.identity_residual = id.residual;
  report.negativity_ok = id.rhs < 0.0;
  if (g.body_count() >= 3) {
    const TSumCheck ts = t_sum_from_geometry(g);
    report.t_sum = ts.t_sum;
    report.t_sum_closed = ts.closed;
    report.t_sum_residual = ts.residual;
  }
  Restlessness rest = restlessness_from_fields(g, fields, std::nullopt);
  report.restless_pairs = std::move(rest.restless_pairs);
  report.accelerating_bodies = rest.accelerating_bodies;
  report.bound_ok = rest.bound_ok;
  report.relative_energy = relative_energy(g);
  return report;
}

}  // namespace

InvariantReport make_invariant_report(const NBodyState& state) {
  require_pairs(state.size());
  InvariantReport report = assemble(state.time(), pair_geometry(state), nbody_accelerations(state).values);
  report.body_frame_residual = body_frame_residual(state).max_relative();
  return report;
}

InvariantReport make_invariant_report(const RelativeState& state) {
  const PairGeometry g = pair_geometry(state);
  InvariantReport report = assemble(state.time(), g, fields_of(g));
  report.triangle_residual = state.triangle_residual();
  return report;
}

}  // namespace relnbody
