#pragma once

// O(N^2) pairwise gravity kernels over a table of pair separations.
//
// Every formulation (absolute, RS1, RS2, body-centered) reduces to the same
// primitive: given s(j,k) = r_j - r_k for j < k, compute the per-body field
//
//     F_j = G * sum_{i != j} m_i (r_i - r_j) / |r_i - r_j|^3
//
// which depends on differences only. F_j is the absolute acceleration of body j
// in any inertial frame, and F_j - F_k is the relative acceleration of pair (j,k).
//
// pair_fields_reference is the literal serial double loop. pair_fields evaluates
// each pair once, shares it between both bodies with a sign flip, and runs both
// phases under OpenMP. Per-body sums are always accumulated in ascending partner
// order, so both kernels return bit-identical results for any thread count.

#include <cstddef>
#include <span>
#include <vector>

#include "relnbody/core_model.hpp"
#include "relnbody/vec3.hpp"

namespace relnbody::kernels {

/// Below this many bodies the OpenMP regions run on the calling thread.
inline constexpr std::size_t kParallelThreshold = 64;

/// s(j,k) = r_j - r_k in lexicographic pair order.
std::vector<Vec3> separations_from_positions(std::span<const Vec3> positions);

/// Throws SingularityError for the first pair (lexicographic) whose separation
/// is zero or strictly below `guard`.
std::vector<Vec3> pair_fields_reference(std::span<const double> masses, double G,
                                        std::span<const Vec3> separations, double guard = 0.0);

std::vector<Vec3> pair_fields(std::span<const double> masses, double G,
                              std::span<const Vec3> separations, double guard = 0.0);

}  // namespace relnbody::kernels
