#include "relnbody/core_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace relnbody {

std::string to_string(const PairKey& key) {
  std::ostringstream os;
  os << '(' << key.j << ',' << key.k << ')';
  return os.str();
}

std::vector<PairKey> all_pairs(std::size_t n) {
  std::vector<PairKey> keys;
  keys.reserve(pair_count(n));
  for (int j = 1; j <= static_cast<int>(n); ++j) {
    for (int k = j + 1; k <= static_cast<int>(n); ++k) keys.push_back({j, k});
  }
  return keys;
}

namespace {

std::string singularity_message(PairKey pair, double separation) {
  std::ostringstream os;
  os << "singular configuration: pair " << to_string(pair) << " separation " << separation;
  return os.str();
}

}  // namespace

SingularityError::SingularityError(PairKey pair, double separation)
    : std::runtime_error(singularity_message(pair, separation)), pair_(pair), separation_(separation) {}

Body::Body(double mass, Vec3 position, Vec3 velocity)
    : mass_(mass), position_(position), velocity_(velocity) {
  if (!(mass > 0.0) || !std::isfinite(mass)) {
    throw std::invalid_argument("body mass must be finite and strictly positive");
  }
  if (!is_finite(position) || !is_finite(velocity)) {
    throw std::invalid_argument("body position and velocity must be finite");
  }
}

NBodyState::NBodyState(double time, std::vector<Body> bodies, double G)
    : time_(time), bodies_(std::move(bodies)), G_(G) {
  if (bodies_.empty()) throw std::invalid_argument("state needs at least one body");
  if (!(G_ > 0.0) || !std::isfinite(G_)) throw std::invalid_argument("G must be finite and positive");
  if (!std::isfinite(time_)) throw std::invalid_argument("time must be finite");
}

std::vector<double> NBodyState::masses() const {
  std::vector<double> out;
  out.reserve(bodies_.size());
  for (const auto& b : bodies_) out.push_back(b.mass());
  return out;
}

std::vector<Vec3> NBodyState::positions() const {
  std::vector<Vec3> out;
  out.reserve(bodies_.size());
  for (const auto& b : bodies_) out.push_back(b.position());
  return out;
}

std::vector<Vec3> NBodyState::velocities() const {
  std::vector<Vec3> out;
  out.reserve(bodies_.size());
  for (const auto& b : bodies_) out.push_back(b.velocity());
  return out;
}

NBodyState NBodyState::translated(const Vec3& shift) const {
  std::vector<Body> moved;
  moved.reserve(bodies_.size());
  for (const auto& b : bodies_) moved.emplace_back(b.mass(), b.position() + shift, b.velocity());
  return NBodyState(time_, std::move(moved), G_);
}

std::string_view to_string(RelativeMode mode) { return mode == RelativeMode::RS1 ? "RS1" : "RS2"; }

std::vector<PairKey> relative_keys(RelativeMode mode, std::size_t n) {
  if (mode == RelativeMode::RS2) return all_pairs(n);
  std::vector<PairKey> keys;
  for (int k = 2; k <= static_cast<int>(n); ++k) keys.push_back({1, k});
  return keys;
}

RelativeState::RelativeState(double time, RelativeMode mode, std::vector<double> masses, double G,
                             std::vector<PairDifference> diffs)
    : time_(time), mode_(mode), masses_(std::move(masses)), G_(G), diffs_(std::move(diffs)) {
  if (masses_.size() < 2) throw std::invalid_argument("relative state needs at least two bodies");
  for (double m : masses_) {
    if (!(m > 0.0) || !std::isfinite(m)) throw std::invalid_argument("masses must be finite and positive");
  }
  if (!(G_ > 0.0)) throw std::invalid_argument("G must be positive");
  const auto keys = relative_keys(mode_, masses_.size());
  if (keys.size() != diffs_.size()) throw std::invalid_argument("difference count does not match mode");
  for (std::size_t i = 0; i < keys.size(); ++i) {
    if (!(diffs_[i].key == keys[i])) {
      throw std::invalid_argument("difference key " + to_string(diffs_[i].key) + " out of layout, expected " +
                                  to_string(keys[i]));
    }
    if (!is_finite(diffs_[i].position) || !is_finite(diffs_[i].velocity)) {
      throw std::invalid_argument("non-finite difference " + to_string(keys[i]));
    }
    if (norm2(diffs_[i].position) == 0.0) throw SingularityError(keys[i], 0.0);
  }
}

const PairDifference& RelativeState::at(PairKey key) const {
  const std::size_t n = masses_.size();
  if (key.j < 1 || key.k > static_cast<int>(n) || key.j >= key.k) {
    throw std::out_of_range("pair key " + to_string(key) + " out of range");
  }
  if (mode_ == RelativeMode::RS1) {
    if (key.j != 1) throw std::out_of_range("RS1 state stores only (1,k) pairs");
    return diffs_[static_cast<std::size_t>(key.k - 2)];
  }
  return diffs_[pair_index(key.j, key.k, n)];
}

double RelativeState::triangle_residual() const {
  if (mode_ == RelativeMode::RS1) return 0.0;
  const std::size_t n = masses_.size();
  double worst = 0.0;
  double scale = 0.0;
  for (const auto& d : diffs_) scale = std::max(scale, norm(d.position));
  for (int j = 2; j <= static_cast<int>(n); ++j) {
    for (int k = j + 1; k <= static_cast<int>(n); ++k) {
      const Vec3 implied = diffs_[pair_index(1, k, n)].position - diffs_[pair_index(1, j, n)].position;
      worst = std::max(worst, norm(diffs_[pair_index(j, k, n)].position - implied));
    }
  }
  return scale > 0.0 ? worst / scale : worst;
}

double PairGeometry::total_mass() const {
  double m = 0.0;
  for (double mi : masses) m += mi;
  return m;
}

PairGeometry pair_geometry(const NBodyState& state) {
  PairGeometry g;
  g.masses = state.masses();
  g.G = state.G();
  const auto& bodies = state.bodies();
  const std::size_t n = bodies.size();
  g.separations.reserve(pair_count(n));
  g.relative_velocities.reserve(pair_count(n));
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t k = j + 1; k < n; ++k) {
      g.separations.push_back(bodies[j].position() - bodies[k].position());
      g.relative_velocities.push_back(bodies[j].velocity() - bodies[k].velocity());
    }
  }
  return g;
}

PairGeometry pair_geometry(const RelativeState& state) {
  PairGeometry g;
  g.masses = state.masses();
  g.G = state.G();
  const std::size_t n = state.body_count();
  if (state.mode() == RelativeMode::RS2) {
    for (const auto& d : state.diffs()) {
      g.separations.push_back(d.position);
      g.relative_velocities.push_back(d.velocity);
    }
    return g;
  }
  // RS1: r_jk = r_1k - r_1j for j >= 2.
  const auto& d = state.diffs();
  g.separations.reserve(pair_count(n));
  g.relative_velocities.reserve(pair_count(n));
  for (int j = 1; j <= static_cast<int>(n); ++j) {
    for (int k = j + 1; k <= static_cast<int>(n); ++k) {
      const auto& dk = d[static_cast<std::size_t>(k - 2)];
      if (j == 1) {
        g.separations.push_back(dk.position);
        g.relative_velocities.push_back(dk.velocity);
      } else {
        const auto& dj = d[static_cast<std::size_t>(j - 2)];
        g.separations.push_back(dk.position - dj.position);
        g.relative_velocities.push_back(dk.velocity - dj.velocity);
      }
    }
  }
  return g;
}

ValidationResult validate_initial_conditions(const NBodyState& state) {
  ValidationResult result;
  const std::size_t n = state.size();
  const auto& bodies = state.bodies();

  for (std::size_t i = 0; i < n; ++i) {
    if (!(bodies[i].mass() > 0.0)) result.nonpositive_masses.push_back(static_cast<int>(i + 1));
  }
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t k = j + 1; k < n; ++k) {
      if (bodies[j].position() == bodies[k].position()) {
        result.violating_pairs.push_back({static_cast<int>(j + 1), static_cast<int>(k + 1)});
      }
    }
  }

  // Difference-coordinate form: r_1k != 0 for k >= 2 and r_1k - r_1j != 0 for
  // 2 <= j < k. Evaluated on the differences themselves.
  if (n >= 2) {
    const Vec3 r1 = bodies[0].position();
    std::vector<Vec3> d(n);
    for (std::size_t k = 1; k < n; ++k) d[k] = r1 - bodies[k].position();
    for (std::size_t k = 1; k < n; ++k) {
      if (d[k] == Vec3{}) result.relative_violations.push_back({1, static_cast<int>(k + 1)});
    }
    for (std::size_t j = 1; j < n; ++j) {
      for (std::size_t k = j + 1; k < n; ++k) {
        if (d[k] - d[j] == Vec3{}) {
          result.relative_violations.push_back({static_cast<int>(j + 1), static_cast<int>(k + 1)});
        }
      }
    }
  }

  result.ok = result.violating_pairs.empty() && result.nonpositive_masses.empty() &&
              result.relative_violations.empty();
  return result;
}

Vec3 center_of_mass(const NBodyState& state) {
  Vec3 weighted;
  double total = 0.0;
  for (const auto& b : state.bodies()) {
    weighted += b.mass() * b.position();
    total += b.mass();
  }
  return weighted / total;
}

RelativeState to_relative(const NBodyState& state, RelativeMode mode) {
  const std::size_t n = state.size();
  if (n < 2) throw std::invalid_argument("relative coordinates need at least two bodies");
  std::vector<PairDifference> diffs;
  for (const auto& key : relative_keys(mode, n)) {
    const Body& a = state.body(key.j);
    const Body& b = state.body(key.k);
    const Vec3 dr = a.position() - b.position();
    if (dr == Vec3{}) throw SingularityError(key, 0.0);
    diffs.push_back({key, dr, a.velocity() - b.velocity()});
  }
  return RelativeState(state.time(), mode, state.masses(), state.G(), std::move(diffs));
}

MinSeparation min_separation(const PairGeometry& geometry) {
  MinSeparation best{std::numeric_limits<double>::infinity(), {0, 0}};
  const std::size_t n = geometry.body_count();
  std::size_t idx = 0;
  for (int j = 1; j <= static_cast<int>(n); ++j) {
    for (int k = j + 1; k <= static_cast<int>(n); ++k, ++idx) {
      const double d = norm(geometry.separations[idx]);
      if (d < best.distance) best = {d, {j, k}};
    }
  }
  return best;
}

}  // namespace relnbody
