#pragma once

#include <string>
#include <vector>

#include "ssfp/instance.hpp"

namespace ssfp {

/// Union-find with path halving and union by size.
class DisjointSets {
 public:
  explicit DisjointSets(int n);
  int find(int x);
  bool unite(int a, int b);
  bool same(int a, int b) { return find(a) == find(b); }

 private:
  std::vector<int> parent_;
  std::vector<int> size_;
};

/// Installation cost of `solution` on top of `existing`: pairs already in
/// `existing` are free, every other pair costs the stage's (multiplied) price.
double cost(const Instance& instance, const EdgePipeSet& existing, const EdgePipeSet& solution);

struct FeasibilityReport {
  bool feasible = false;
  /// Empty when feasible; otherwise names the first disconnected group.
  std::string diagnostic;
  explicit operator bool() const noexcept { return feasible; }
};

/// True iff every terminal group lies in one component of the subgraph formed
/// by pairs whose pipe is feasible and whose edge is admissible. Other pairs
/// are allowed in the solution but carry no connection.
FeasibilityReport validate_feasible(const Instance& instance, const EdgePipeSet& solution);

/// True iff group k's terminals are connected through admissible edges.
bool is_connected_within(const Instance& instance, int group_index);

/// Throws ValidationError if a pair references an unknown pipe or edge.
void check_pair_ids(const Instance& instance, const EdgePipeSet& pairs, const std::string& what);

}  // namespace ssfp
