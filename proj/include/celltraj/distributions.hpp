#pragma once

#include "celltraj/types.hpp"

namespace celltraj {

// Default simplex smoothing used by the estimation pipeline before a marginal
// enters the KL penalty as source.
inline constexpr double kDefaultSmoothDelta = 1e-6;

// Empirical type distribution of one snapshot: entry k = #{labels == k} / n.
Marginal empirical_marginal(const Snapshot& snap, int d);

// Additive smoothing on the simplex: entry k = (q_k + delta) / (1 + d delta).
// Keeps the KL penalty finite when a type is absent from the source sample.
Marginal smooth(const Marginal& q, double delta);

// Growth map: entry j proportional to g_j q_j, renormalized. Growth reweights
// types in place; no mass moves between types.
Marginal apply_growth(const Marginal& q, const GrowthProfile& g);

}  // namespace celltraj
