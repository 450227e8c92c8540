#pragma once

// Domain types shared by every module: bodies, absolute and relative
// snapshots, pair bookkeeping, and the errors raised on degenerate input.
//
// Bodies are numbered 1..N in input order. Body 1 is the origin body of any
// body-centered frame. Pair keys (j, k) always satisfy j < k and are laid out
// lexicographically: (1,2), (1,3), ..., (1,N), (2,3), ..., (N-1,N).

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "relnbody/vec3.hpp"

namespace relnbody {

struct PairKey {
  int j = 0;
  int k = 0;
  friend constexpr bool operator==(const PairKey&, const PairKey&) = default;
};

std::string to_string(const PairKey& key);

/// Number of unordered pairs among n bodies.
constexpr std::size_t pair_count(std::size_t n) { return n < 2 ? 0 : n * (n - 1) / 2; }

/// Position of pair (j, k), j < k, 1-based, in the lexicographic layout.
constexpr std::size_t pair_index(int j, int k, std::size_t n) {
  const auto jj = static_cast<std::size_t>(j - 1);
  const auto kk = static_cast<std::size_t>(k - 1);
  return jj * n - jj * (jj + 1) / 2 + (kk - jj - 1);
}

std::vector<PairKey> all_pairs(std::size_t n);

/// Raised when two bodies (or a stored difference) are closer than the
/// active guard distance; carries the offending pair.
class SingularityError : public std::runtime_error {
 public:
  SingularityError(PairKey pair, double separation);
  PairKey pair() const { return pair_; }
  double separation() const { return separation_; }

 private:
  PairKey pair_;
  double separation_;
};

class Body {
 public:
  /// Throws std::invalid_argument unless mass > 0 and every component is finite.
  Body(double mass, Vec3 position, Vec3 velocity = {});

  double mass() const { return mass_; }
  const Vec3& position() const { return position_; }
  const Vec3& velocity() const { return velocity_; }

  friend bool operator==(const Body&, const Body&) = default;

 private:
  double mass_;
  Vec3 position_;
  Vec3 velocity_;
};

/// Absolute-frame snapshot. Pairwise separation is not enforced here so that
/// validate_initial_conditions can report coincident bodies.
class NBodyState {
 public:
  NBodyState(double time, std::vector<Body> bodies, double G = 1.0);

  double time() const { return time_; }
  double G() const { return G_; }
  std::size_t size() const { return bodies_.size(); }
  const std::vector<Body>& bodies() const { return bodies_; }
  /// 1-based access.
  const Body& body(int i) const { return bodies_.at(static_cast<std::size_t>(i - 1)); }

  std::vector<double> masses() const;
  std::vector<Vec3> positions() const;
  std::vector<Vec3> velocities() const;

  NBodyState translated(const Vec3& shift) const;

 private:
  double time_;
  std::vector<Body> bodies_;
  double G_;
};

enum class RelativeMode { RS1, RS2 };

std::string_view to_string(RelativeMode mode);

struct PairDifference {
  PairKey key;
  Vec3 position;  // r_j - r_k
  Vec3 velocity;  // r_j' - r_k'
};

/// Difference coordinates. RS1 holds the N-1 entries (1,k); RS2 holds all
/// N(N-1)/2 entries (j,k). RS2 triangle consistency is measured, not enforced.
class RelativeState {
 public:
  /// Throws std::invalid_argument if the keys do not match the mode layout and
  /// SingularityError if any stored difference is the zero vector.
  RelativeState(double time, RelativeMode mode, std::vector<double> masses, double G,
                std::vector<PairDifference> diffs);

  double time() const { return time_; }
  RelativeMode mode() const { return mode_; }
  double G() const { return G_; }
  std::size_t body_count() const { return masses_.size(); }
  const std::vector<double>& masses() const { return masses_; }
  const std::vector<PairDifference>& diffs() const { return diffs_; }
  const PairDifference& at(PairKey key) const;

  /// Largest |r_jk - (r_1k - r_1j)| over pairs with j >= 2, relative to the
  /// largest stored separation. Zero for RS1.
  double triangle_residual() const;

 private:
  double time_;
  RelativeMode mode_;
  std::vector<double> masses_;
  double G_;
  std::vector<PairDifference> diffs_;
};

/// Expected key layout for a mode.
std::vector<PairKey> relative_keys(RelativeMode mode, std::size_t n);

/// Full pair table (separations and relative velocities for every j < k)
/// derived from either kind of snapshot. RS1 data is expanded through
/// r_jk = r_1k - r_1j; absolute positions are never reconstructed.
struct PairGeometry {
  std::vector<double> masses;
  double G = 1.0;
  std::vector<Vec3> separations;          // r_j - r_k, lexicographic
  std::vector<Vec3> relative_velocities;  // r_j' - r_k'

  std::size_t body_count() const { return masses.size(); }
  double total_mass() const;
  const Vec3& separation(int j, int k) const { return separations[pair_index(j, k, masses.size())]; }
};

PairGeometry pair_geometry(const NBodyState& state);
PairGeometry pair_geometry(const RelativeState& state);

struct ValidationResult {
  bool ok = true;
  std::vector<PairKey> violating_pairs;     // coincident absolute positions
  std::vector<int> nonpositive_masses;      // 1-based; empty for constructed Body objects
  std::vector<PairKey> relative_violations; // pairs flagged by the difference-coordinate conditions
};

/// Checks r_i != r_j for all pairs, and independently the equivalent
/// difference-coordinate conditions r_1k != 0 and r_1k - r_1j != 0.
ValidationResult validate_initial_conditions(const NBodyState& state);

Vec3 center_of_mass(const NBodyState& state);

/// Throws SingularityError naming the first zero difference.
RelativeState to_relative(const NBodyState& state, RelativeMode mode);

/// Smallest pairwise separation and the pair that attains it.
struct MinSeparation {
  double distance;
  PairKey pair;
};
MinSeparation min_separation(const PairGeometry& geometry);

}  // namespace relnbody
