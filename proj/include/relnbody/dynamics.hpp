#pragma once

// Right-hand sides for the absolute equations of motion, the two
// difference-coordinate systems (RS1 over r_1k, RS2 over every r_jk), the
// body-centered reduced system, the naive body-centered three-body system, and
// the body-frame transform identity.

#include <vector>

#include "relnbody/core_model.hpp"
#include "relnbody/vec3.hpp"

namespace relnbody {

struct AccelerationSet {
  enum class Layout { PerBody, PerPair };

  Layout layout = Layout::PerBody;
  std::vector<PairKey> keys;  // PerPair only, same order as the input diffs
  std::vector<Vec3> values;

  /// PerBody: 1-based body index.
  const Vec3& body(int i) const { return values.at(static_cast<std::size_t>(i - 1)); }
  /// PerPair lookup.
  const Vec3& at(PairKey key) const;
  /// Largest vector norm in the set.
  double scale() const;
};

/// a_i = sum_{j != i} G m_j (r_j - r_i) / |r_j - r_i|^3. N = 1 gives zero.
/// Throws SingularityError for separations that are zero or below `guard`.
AccelerationSet nbody_accelerations(const NBodyState& state, double guard = 0.0);

/// (r_1 - r_k)'' for k = 2..N from the stored r_1k alone, using
/// r_i - r_k = (r_1 - r_k) - (r_1 - r_i).
AccelerationSet rs1_rhs(const RelativeState& rel, double guard = 0.0);

/// (r_j - r_k)'' = F_j - F_k for every stored pair, where F is built from the
/// stored differences with r_ij = -r_ji.
AccelerationSet rs2_rhs(const RelativeState& rel, double guard = 0.0);

/// Same quantity as rs2_rhs, evaluated term by term from the expanded form
///   -G (m_j + m_k) r_jk / |r_jk|^3 + G sum_{i != j,k} m_i [ r_ij/|r_ij|^3 - r_ik/|r_ik|^3 ].
/// O(N^3); kept as an independent route.
AccelerationSet rs2_rhs_expanded(const RelativeState& rel, double guard = 0.0);

/// Body-centered system obtained by pinning body 1 at the origin. The RS1
/// diffs are read as r_1k = -r_k. Values are keyed (1,k) and hold the left side
/// -r_k'' (which is (r_1 - r_k)''), so the set compares directly with rs1_rhs.
AccelerationSet reduced_bcos_rhs(const RelativeState& rel, double guard = 0.0);

/// Body-frame accelerations r_k'' (k = 2..N) from a reduced_bcos_rhs result.
std::vector<Vec3> body_frame_accelerations(const AccelerationSet& reduced);

/// Three-body equations with body 1 pinned at the origin. The first equation
/// of that system demands `constraint` be zero.
struct Bcos3NaiveRhs {
  Vec3 constraint;  // G m2 r2/|r2|^3 + G m3 r3/|r3|^3
  Vec3 a2;
  Vec3 a3;
};

/// Requires N = 3, body 1 at the origin with zero velocity.
Bcos3NaiveRhs bcos3_naive_rhs(const NBodyState& state, double guard = 0.0);

struct BodyFrameResidual {
  std::vector<double> residuals;  // one per body
  double acceleration_scale;      // max |a_i|
  double max_relative() const;
};

/// Compares (a_1 + a~_i) with the right side written in body-1 coordinates
/// r~_i = r_i - r_1. Every residual vanishes in exact arithmetic.
BodyFrameResidual body_frame_residual(const NBodyState& state);

}  // namespace relnbody
