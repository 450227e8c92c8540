#pragma once

// Checks built on the pair-weighted identity
//
//   sum_{j<k} m_j m_k (r_j - r_k) . (r_j - r_k)''  =  -G M sum_{j<k} m_j m_k / |r_j - r_k|,
//
// its intermediate T(j,k) sum, the body-centered three-body consistency
// analysis, translation invariance of the relative systems, and the
// "restless" consequences (relative accelerations never all vanish).

#include <optional>
#include <string_view>
#include <vector>

#include "relnbody/core_model.hpp"
#include "relnbody/vec3.hpp"

namespace relnbody {

/// Floor applied to denominators of relative residuals.
inline constexpr double kResidualFloor = 1e-300;

struct IdentityCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  double residual = 0.0;  // |lhs - rhs| / max(|rhs|, floor)
};

/// lhs uses nbody_accelerations differenced per pair; rhs is the closed form.
IdentityCheck motion_identity(const NBodyState& state);
/// Same identity evaluated from difference coordinates only.
IdentityCheck motion_identity(const RelativeState& state);

struct TSumCheck {
  double t_sum = 0.0;   // sum of T(j,k), evaluated term by term
  double closed = 0.0;  // -G sum (M - m_j - m_k) m_j m_k / |r_jk|
  double residual = 0.0;
};

/// N >= 3 (for N = 2 both sides are zero and the residual is reported as 0).
TSumCheck t_sum_check(const NBodyState& state);
TSumCheck t_sum_check(const RelativeState& state);

/// sum_{j<k} -G m_j m_k (m_j + m_k) / |r_jk|, the part of the identity's left
/// side that does not involve third bodies.
double pair_self_term(const PairGeometry& geometry);

enum class Bcos3Verdict { Consistent, InconsistentMassRatio, InconsistentGeometry };

std::string_view to_string(Bcos3Verdict verdict);

struct Bcos3Consistency {
  Bcos3Verdict verdict;
  double mass_mismatch;        // |m2 - m3| / max(m2, m3)
  double geometry_mismatch;    // |r2 + sqrt(m2/m3) r3|
  double geometry_tolerance;   // 1e-9 * max(|r2|, |r3|)
  double constraint_residual;  // |m2 r2/|r2|^3 + m3 r3/|r3|^3|
};

inline constexpr double kBcosMassTolerance = 1e-9;
inline constexpr double kBcosGeometryTolerance = 1e-9;

/// Body 1 at the origin, bodies 2 and 3 at r2, r3. Consistent only for
/// m2 = m3 and r2 = -sqrt(m2/m3) r3. Throws std::invalid_argument for zero r.
Bcos3Consistency bcos3_consistency_check(double m2, double m3, const Vec3& r2, const Vec3& r3);

/// |G m2 r2 / |r2|^3| = G m2 / |r2|^2: the acceleration the two-body
/// body-centered equations force to be zero.
double two_body_bcos_contradiction(double m2, const Vec3& r2, double G);

struct Restlessness {
  std::vector<PairKey> restless_pairs;  // |(r_j - r_k)''| > delta
  int accelerating_bodies = 0;          // |F_i| > delta
  bool bound_ok = false;                // weighted_sum >= |rhs|
  double weighted_sum = 0.0;            // sum m_j m_k |r_jk| |r_jk''|
  double identity_rhs = 0.0;
  double delta = 0.0;
};

/// |rhs| / (2 * P * max_p m_j m_k |r_jk|) with P the pair count. Some pair's
/// relative acceleration is provably at least twice this value.
double default_restlessness_threshold(const PairGeometry& geometry);

Restlessness restlessness_check(const NBodyState& state, std::optional<double> delta = std::nullopt);
Restlessness restlessness_check(const RelativeState& state, std::optional<double> delta = std::nullopt);

/// Max over RS1 and RS2 keys of |rhs(shifted) - rhs| / max(1, |rhs|), with both
/// evaluated after translating every position by `shift` and re-deriving the
/// difference coordinates.
double translation_invariance_residual(const NBodyState& state, const Vec3& shift);

/// Relative (center-of-mass frame) energy from pair data only:
///   sum m_j m_k |v_jk|^2 / (2M) - G sum m_j m_k / |r_jk|.
double relative_energy(const PairGeometry& geometry);

struct InvariantReport {
  double time = 0.0;
  double identity_lhs = 0.0;
  double identity_rhs = 0.0;
  double identity_residual = 0.0;
  double t_sum = 0.0;
  double t_sum_closed = 0.0;
  double t_sum_residual = 0.0;
  std::vector<PairKey> restless_pairs;
  int accelerating_bodies = 0;
  bool negativity_ok = false;
  bool bound_ok = false;
  double relative_energy = 0.0;
  double triangle_residual = 0.0;                   // RS2 drift, 0 otherwise
  std::optional<double> body_frame_residual;        // absolute snapshots only
};

InvariantReport make_invariant_report(const NBodyState& state);
InvariantReport make_invariant_report(const RelativeState& state);

}  // namespace relnbody
