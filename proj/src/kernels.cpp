#include "relnbody/kernels.hpp"

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>

namespace relnbody::kernels {

namespace {

inline double inverse_cube(double distance) { return 1.0 / (distance * distance * distance); }

inline bool too_close(double distance, double guard) { return distance == 0.0 || distance < guard; }

void check_sizes(std::size_t n, std::size_t pairs) {
  if (pair_count(n) != pairs) throw std::invalid_argument("separation table size does not match body count");
}

PairKey key_at(std::size_t idx, std::size_t n) {
  for (int j = 1; j < static_cast<int>(n); ++j) {
    const std::size_t row = n - static_cast<std::size_t>(j);
    if (idx < row) return {j, j + 1 + static_cast<int>(idx)};
    idx -= row;
  }
  return {0, 0};
}

}  // namespace

std::vector<Vec3> separations_from_positions(std::span<const Vec3> positions) {
  const std::size_t n = positions.size();
  std::vector<Vec3> out(pair_count(n));
  const auto rows = static_cast<std::int64_t>(n);
#pragma omp parallel for schedule(static) if (n >= kParallelThreshold)
  for (std::int64_t j = 0; j < rows; ++j) {
    const auto jj = static_cast<std::size_t>(j);
    std::size_t idx = pair_index(static_cast<int>(jj + 1), static_cast<int>(jj + 2), n);
    for (std::size_t k = jj + 1; k < n; ++k, ++idx) out[idx] = positions[jj] - positions[k];
  }
  return out;
}

std::vector<Vec3> pair_fields_reference(std::span<const double> masses, double G,
                                        std::span<const Vec3> separations, double guard) {
  const std::size_t n = masses.size();
  check_sizes(n, separations.size());

  std::size_t idx = 0;
  for (int j = 1; j <= static_cast<int>(n); ++j) {
    for (int k = j + 1; k <= static_cast<int>(n); ++k, ++idx) {
      const double d = norm(separations[idx]);
      if (too_close(d, guard)) throw SingularityError({j, k}, d);
    }
  }

  std::vector<Vec3> fields(n);
  for (std::size_t j = 0; j < n; ++j) {
    Vec3 acc;
    for (std::size_t i = 0; i < n; ++i) {
      if (i == j) continue;
      // r_i - r_j
      const Vec3 u = i < j ? separations[pair_index(static_cast<int>(i + 1), static_cast<int>(j + 1), n)]
                           : -separations[pair_index(static_cast<int>(j + 1), static_cast<int>(i + 1), n)];
      acc += (G * masses[i]) * (u * inverse_cube(norm(u)));
    }
    fields[j] = acc;
  }
  return fields;
}

std::vector<Vec3> pair_fields(std::span<const double> masses, double G, std::span<const Vec3> separations,
                              double guard) {
  const std::size_t n = masses.size();
  const std::size_t pairs = separations.size();
  check_sizes(n, pairs);

  // Phase 1: w(j,k) = s(j,k) / |s(j,k)|^3, once per pair.
  std::vector<Vec3> weighted(pairs);
  std::size_t first_bad = std::numeric_limits<std::size_t>::max();
  const auto count = static_cast<std::int64_t>(pairs);
#pragma omp parallel for schedule(static) reduction(min : first_bad) if (n >= kParallelThreshold)
  for (std::int64_t p = 0; p < count; ++p) {
    const auto pp = static_cast<std::size_t>(p);
    const double d = norm(separations[pp]);
    if (too_close(d, guard)) {
      if (pp < first_bad) first_bad = pp;
      continue;
    }
    weighted[pp] = separations[pp] * inverse_cube(d);
  }
  if (first_bad != std::numeric_limits<std::size_t>::max()) {
    throw SingularityError(key_at(first_bad, n), norm(separations[first_bad]));
  }

  // Phase 2: per-body sums in ascending partner order.
  std::vector<Vec3> fields(n);
  const auto rows = static_cast<std::int64_t>(n);
#pragma omp parallel for schedule(static) if (n >= kParallelThreshold)
  for (std::int64_t jr = 0; jr < rows; ++jr) {
    const auto j = static_cast<std::size_t>(jr);
    Vec3 acc;
    for (std::size_t i = 0; i < j; ++i) {
      acc += (G * masses[i]) * weighted[pair_index(static_cast<int>(i + 1), static_cast<int>(j + 1), n)];
    }
    if (j + 1 < n) {
      std::size_t idx = pair_index(static_cast<int>(j + 1), static_cast<int>(j + 2), n);
      for (std::size_t i = j + 1; i < n; ++i, ++idx) acc += (G * masses[i]) * (-weighted[idx]);
    }
    fields[j] = acc;
  }
  return fields;
}

}  // namespace relnbody::kernels
