#include "relnbody/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "relnbody/kernels.hpp"

namespace relnbody {

const Vec3& AccelerationSet::at(PairKey key) const {
  if (layout != Layout::PerPair) throw std::logic_error("per-body acceleration set has no pair keys");
  for (std::size_t i = 0; i < keys.size(); ++i) {
    if (keys[i] == key) return values[i];
  }
  throw std::out_of_range("pair " + to_string(key) + " not in acceleration set");
}

double AccelerationSet::scale() const {
  double s = 0.0;
  for (const auto& v : values) s = std::max(s, norm(v));
  return s;
}

namespace {

Vec3 pull(double gm, const Vec3& toward, double guard, PairKey key) {
  const double d = norm(toward);
  if (d == 0.0 || d < guard) throw SingularityError(key, d);
  return gm * (toward / (d * d * d));
}

AccelerationSet pair_differences(const RelativeState& rel, const std::vector<Vec3>& fields) {
  AccelerationSet out;
  out.layout = AccelerationSet::Layout::PerPair;
  for (const auto& d : rel.diffs()) {
    out.keys.push_back(d.key);
    out.values.push_back(fields[static_cast<std::size_t>(d.key.j - 1)] -
                         fields[static_cast<std::size_t>(d.key.k - 1)]);
  }
  return out;
}

}  // namespace

AccelerationSet nbody_accelerations(const NBodyState& state, double guard) {
  const auto positions = state.positions();
  const auto masses = state.masses();
  const auto seps = kernels::separations_from_positions(positions);
  AccelerationSet out;
  out.layout = AccelerationSet::Layout::PerBody;
  out.values = kernels::pair_fields(masses, state.G(), seps, guard);
  return out;
}

AccelerationSet rs1_rhs(const RelativeState& rel, double guard) {
  if (rel.mode() != RelativeMode::RS1) throw std::invalid_argument("rs1_rhs needs an RS1 state");
  const PairGeometry g = pair_geometry(rel);
  return pair_differences(rel, kernels::pair_fields(g.masses, g.G, g.separations, guard));
}

AccelerationSet rs2_rhs(const RelativeState& rel, double guard) {
  if (rel.mode() != RelativeMode::RS2) throw std::invalid_argument("rs2_rhs needs an RS2 state");
  const PairGeometry g = pair_geometry(rel);
  return pair_differences(rel, kernels::pair_fields(g.masses, g.G, g.separations, guard));
}

AccelerationSet rs2_rhs_expanded(const RelativeState& rel, double guard) {
  if (rel.mode() != RelativeMode::RS2) throw std::invalid_argument("rs2_rhs_expanded needs an RS2 state");
  const std::size_t n = rel.body_count();
  const auto& m = rel.masses();
  const double G = rel.G();

  // r_ab / |r_ab|^3 for any ordered pair, from the stored j < k entries.
  auto scaled = [&](int a, int b) -> Vec3 {
    const bool forward = a < b;
    const PairKey key = forward ? PairKey{a, b} : PairKey{b, a};
    const Vec3& s = rel.at(key).position;
    const double d = norm(s);
    if (d == 0.0 || d < guard) throw SingularityError(key, d);
    const Vec3 w = s / (d * d * d);
    return forward ? w : -w;
  };

  AccelerationSet out;
  out.layout = AccelerationSet::Layout::PerPair;
  for (const auto& diff : rel.diffs()) {
    const int j = diff.key.j;
    const int k = diff.key.k;
    Vec3 acc = -G * (m[static_cast<std::size_t>(j - 1)] + m[static_cast<std::size_t>(k - 1)]) * scaled(j, k);
    for (int i = 1; i <= static_cast<int>(n); ++i) {
      if (i == j || i == k) continue;
      acc += G * m[static_cast<std::size_t>(i - 1)] * (scaled(i, j) - scaled(i, k));
    }
    out.keys.push_back(diff.key);
    out.values.push_back(acc);
  }
  return out;
}

AccelerationSet reduced_bcos_rhs(const RelativeState& rel, double guard) {
  if (rel.mode() != RelativeMode::RS1) throw std::invalid_argument("reduced_bcos_rhs needs an RS1 state");
  const std::size_t n = rel.body_count();
  const auto& m = rel.masses();
  const double G = rel.G();

  // Body-frame positions r_k = -r_1k, index 0 unused (body 1 sits at the origin).
  std::vector<Vec3> r(n);
  for (const auto& d : rel.diffs()) r[static_cast<std::size_t>(d.key.k - 1)] = -d.position;

  Vec3 common;  // sum_{i>=2} m_i r_i / |r_i|^3
  for (std::size_t i = 1; i < n; ++i) common += pull(m[i], r[i], guard, {1, static_cast<int>(i + 1)});

  AccelerationSet out;
  out.layout = AccelerationSet::Layout::PerPair;
  for (std::size_t k = 1; k < n; ++k) {
    const PairKey key{1, static_cast<int>(k + 1)};
    Vec3 lhs = G * common + G * pull(m[0], r[k], guard, key);
    for (std::size_t i = 1; i < n; ++i) {
      if (i == k) continue;
      const PairKey ik{static_cast<int>(std::min(i, k) + 1), static_cast<int>(std::max(i, k) + 1)};
      lhs -= G * pull(m[i], r[i] - r[k], guard, ik);
    }
    out.keys.push_back(key);
    out.values.push_back(lhs);
  }
  return out;
}

std::vector<Vec3> body_frame_accelerations(const AccelerationSet& reduced) {
  std::vector<Vec3> out;
  out.reserve(reduced.values.size());
  for (const auto& v : reduced.values) out.push_back(-v);
  return out;
}

Bcos3NaiveRhs bcos3_naive_rhs(const NBodyState& state, double guard) {
  if (state.size() != 3) throw std::invalid_argument("bcos3_naive_rhs needs exactly three bodies");
  if (!(state.body(1).position() == Vec3{}) || !(state.body(1).velocity() == Vec3{})) {
    throw std::invalid_argument("bcos3_naive_rhs needs body 1 at rest at the origin");
  }
  const double G = state.G();
  const double m1 = state.body(1).mass();
  const double m2 = state.body(2).mass();
  const double m3 = state.body(3).mass();
  const Vec3 r2 = state.body(2).position();
  const Vec3 r3 = state.body(3).position();

  Bcos3NaiveRhs out;
  out.constraint = pull(G * m2, r2, guard, {1, 2}) + pull(G * m3, r3, guard, {1, 3});
  out.a2 = -pull(G * m1, r2, guard, {1, 2}) + pull(G * m3, r3 - r2, guard, {2, 3});
  out.a3 = -pull(G * m1, r3, guard, {1, 3}) + pull(G * m2, r2 - r3, guard, {2, 3});
  return out;
}

double BodyFrameResidual::max_relative() const {
  double worst = 0.0;
  for (double r : residuals) worst = std::max(worst, r);
  return acceleration_scale > 0.0 ? worst / acceleration_scale : worst;
}

BodyFrameResidual body_frame_residual(const NBodyState& state) {
  const std::size_t n = state.size();
  if (n < 2) throw std::invalid_argument("body_frame_residual needs at least two bodies");
  const auto acc = nbody_accelerations(state);
  const double G = state.G();
  const auto masses = state.masses();

  std::vector<Vec3> rt(n);  // r~_i = r_i - r_1
  for (std::size_t i = 0; i < n; ++i) rt[i] = state.bodies()[i].position() - state.bodies()[0].position();

  BodyFrameResidual out;
  out.acceleration_scale = acc.scale();
  out.residuals.resize(n);

  const Vec3 a1 = acc.values[0];
  Vec3 origin_side;
  for (std::size_t j = 1; j < n; ++j) origin_side += pull(G * masses[j], rt[j], 0.0, {1, static_cast<int>(j + 1)});
  out.residuals[0] = norm(a1 - origin_side);

  for (std::size_t i = 1; i < n; ++i) {
    const Vec3 frame_acc = acc.values[i] - a1;  // r~_i''
    Vec3 rhs;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      const PairKey key{static_cast<int>(std::min(i, j) + 1), static_cast<int>(std::max(i, j) + 1)};
      rhs += pull(G * masses[j], rt[j] - rt[i], 0.0, key);
    }
    out.residuals[i] = norm((a1 + frame_acc) - rhs);
  }
  return out;
}

}  // namespace relnbody
