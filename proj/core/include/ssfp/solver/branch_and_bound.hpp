#pragma once

#include "ssfp/milp/model.hpp"

namespace ssfp::solver {

enum class Branching {
  /// Most fractional binary, lowest index on ties; implied-integer variables
  /// only once every binary is integral.
  kMostFractional,
  /// Pseudocost branching over all integer variables, pseudocosts seeded by
  /// iteration-limited strong branching until they are reliable.
  kReliability,
};

struct BnbConfig {
  long long node_limit = 10'000'000;
  /// A node is pruned once its bound is within this distance of the incumbent.
  double absolute_gap = 1e-9;
  double integrality_tol = 1e-6;
  /// An objective value known to be attainable. Nodes bounded above it (plus a
  /// 1e-6 relative margin) are pruned before any incumbent exists. A cutoff
  /// below the true optimum makes the solve report kInfeasible.
  double cutoff = milp::kInfinity;
  Branching branching = Branching::kMostFractional;
  /// Reliability branching: observations per direction before a pseudocost
  /// is trusted, candidates tried per node, and dual iterations per trial.
  int reliability = 4;
  int strong_candidates = 16;
  int strong_iterations = 60;
};

/// Exact branch-and-bound for mixed-binary models.
///
/// Nodes are taken best-bound first (ties: deeper node, then creation order).
/// The branching variable is chosen by `config.branching`. Child LPs are
/// warm-started from the parent's basis and nonbasic binaries are fixed by
/// reduced cost against the incumbent.
///
/// Returns kNodeLimit with the best incumbent (if any) and bound when the
/// limit is reached. Throws ValidationError if node_limit < 1.
milp::Solution solve_milp(const milp::Model& model, const BnbConfig& config = {});

}  // namespace ssfp::solver
