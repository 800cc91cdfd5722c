#pragma once

#include <span>
#include <vector>

#include "ssfp/instance.hpp"
#include "ssfp/kinds.hpp"

namespace ssfp::solver {

/// Largest number of (pipe, edge) pairs brute_force will enumerate.
inline constexpr int kBruteForceBudget = 22;

struct BruteForceResult {
  double objective = 0.0;
  /// Pairs installed in stage one, excluding pre-existing ones.
  EdgePipeSet first_stage;
  /// Pairs added in each scenario on top of first_stage and the existing set
  /// (empty for DO).
  std::vector<EdgePipeSet> recourse;
};

/// Exhaustive optimum of the DO, RO or SO problem, independent of any LP.
///
/// Every first-stage subset of pairs is enumerated (pruned by its cost against
/// the incumbent) and checked with a union-find connectivity test; the cheapest
/// completion of every superset in every scenario comes from a dynamic program
/// over all subsets. `probabilities` overrides the instance's when non-empty.
/// Throws ValidationError when |pipes| * |edges| exceeds kBruteForceBudget.
BruteForceResult brute_force(const TwoStageInstance& two_stage, Optimization mode,
                             std::span<const double> probabilities = {});

/// Single-stage version: cheapest feasible set on top of `existing`.
BruteForceResult brute_force(const Instance& instance, const EdgePipeSet& existing);

}  // namespace ssfp::solver
