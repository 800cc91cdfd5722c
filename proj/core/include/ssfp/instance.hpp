#pragma once

#include <memory>
#include <set>
#include <span>
#include <vector>

#include "ssfp/graph.hpp"

namespace ssfp {

/// Pipe types are numbered 1..P.
using PipeId = int;

/// Pipe types and their base installation cost on every edge.
class PipeCatalog {
 public:
  PipeCatalog() = default;
  /// `per_edge[e][p - 1]` is the base cost of pipe p on edge e; all must be > 0.
  PipeCatalog(int num_types, const std::vector<std::vector<double>>& per_edge);

  /// Every pipe p costs `ratios[p - 1] * edge_costs[e]` on edge e.
  static PipeCatalog scaled(std::span<const double> edge_costs, std::span<const double> ratios);

  int num_types() const noexcept { return num_types_; }
  int num_edges() const noexcept { return num_edges_; }
  double base_cost(PipeId p, EdgeId e) const {
    return costs_.at(static_cast<size_t>(e) * static_cast<size_t>(num_types_) + static_cast<size_t>(p - 1));
  }
  bool has_pipe(PipeId p) const noexcept { return p >= 1 && p <= num_types_; }

  friend bool operator==(const PipeCatalog&, const PipeCatalog&) = default;

 private:
  int num_types_ = 0;
  int num_edges_ = 0;
  std::vector<double> costs_;
};

/// Pairwise disjoint terminal groups. The root of each group is its
/// minimum-index vertex.
class TerminalGroups {
 public:
  TerminalGroups() = default;
  TerminalGroups(int num_vertices, std::vector<std::vector<Vertex>> groups);

  int num_groups() const noexcept { return static_cast<int>(groups_.size()); }
  /// Group k (0-based), sorted ascending.
  std::span<const Vertex> group(int k) const { return groups_.at(static_cast<size_t>(k)); }
  const std::vector<std::vector<Vertex>>& groups() const noexcept { return groups_; }
  Vertex root(int k) const { return groups_.at(static_cast<size_t>(k)).front(); }

  /// 0-based group index of v, or -1 when v is not a terminal.
  int group_of(Vertex v) const;
  bool is_terminal(Vertex v) const { return group_of(v) >= 0; }
  bool is_root(Vertex v) const;

  int num_terminals() const noexcept;
  /// Terminals of groups k..K-1 without the root of group k, ordered by group then vertex.
  std::vector<Vertex> terminals_from(int k) const;
  /// All terminals that are not roots, ordered by group then vertex.
  std::vector<Vertex> non_root_terminals() const;
  /// Vertices that belong to no group.
  std::vector<Vertex> steiner_vertices() const;

  friend bool operator==(const TerminalGroups& a, const TerminalGroups& b) {
    return a.groups_ == b.groups_ && a.group_of_ == b.group_of_;
  }

 private:
  std::vector<std::vector<Vertex>> groups_;
  std::vector<int> group_of_;  // indexed by vertex - 1
};

struct EdgePipe {
  PipeId pipe = 0;
  EdgeId edge = 0;
  friend auto operator<=>(const EdgePipe&, const EdgePipe&) = default;
};

/// A set of installed (pipe, edge) pairs.
class EdgePipeSet {
 public:
  using const_iterator = std::set<EdgePipe>::const_iterator;

  EdgePipeSet() = default;
  EdgePipeSet(std::initializer_list<EdgePipe> pairs) : pairs_(pairs) {}
  template <typename It>
  EdgePipeSet(It first, It last) : pairs_(first, last) {}

  bool insert(EdgePipe pair) { return pairs_.insert(pair).second; }
  bool erase(EdgePipe pair) { return pairs_.erase(pair) > 0; }
  bool contains(EdgePipe pair) const { return pairs_.count(pair) > 0; }
  size_t size() const noexcept { return pairs_.size(); }
  bool empty() const noexcept { return pairs_.empty(); }
  const_iterator begin() const noexcept { return pairs_.begin(); }
  const_iterator end() const noexcept { return pairs_.end(); }

  EdgePipeSet united(const EdgePipeSet& other) const;
  EdgePipeSet intersected(const EdgePipeSet& other) const;
  EdgePipeSet minus(const EdgePipeSet& other) const;

  friend bool operator==(const EdgePipeSet&, const EdgePipeSet&) = default;

 private:
  std::set<EdgePipe> pairs_;
};

/// One stage (or scenario) of the routing problem: the shared graph and
/// catalog plus this stage's terminal groups, feasible pipe types, admissible
/// edges and cost multiplier.
class Instance {
 public:
  Instance() = default;
  /// Checks id ranges only; call validate() for the full set of invariants.
  Instance(std::shared_ptr<const Graph> graph, std::shared_ptr<const PipeCatalog> pipes,
           TerminalGroups terminals, std::vector<PipeId> feasible_pipes,
           std::vector<EdgeId> admissible_edges, double cost_multiplier = 1.0);

  const Graph& graph() const { return *graph_; }
  const std::shared_ptr<const Graph>& graph_ptr() const noexcept { return graph_; }
  const PipeCatalog& pipes() const { return *pipes_; }
  const std::shared_ptr<const PipeCatalog>& pipes_ptr() const noexcept { return pipes_; }
  const TerminalGroups& terminals() const noexcept { return terminals_; }

  /// Sorted ascending.
  std::span<const PipeId> feasible_pipes() const noexcept { return feasible_pipes_; }
  bool is_feasible_pipe(PipeId p) const;
  /// Sorted ascending.
  std::span<const EdgeId> admissible_edges() const noexcept { return admissible_edges_; }
  bool is_admissible(EdgeId e) const { return admissible_mask_.at(static_cast<size_t>(e)) != 0; }
  /// Both orientations of every admissible edge, ascending.
  std::vector<ArcId> admissible_arcs() const;

  double cost_multiplier() const noexcept { return multiplier_; }
  /// Installation cost of pipe p on edge e in this stage.
  double cost(PipeId p, EdgeId e) const { return multiplier_ * pipes_->base_cost(p, e); }

  /// Throws ValidationError on empty pipe/edge sets or a multiplier below 1,
  /// and InfeasibleInstanceError when a group is disconnected in (V, admissible edges).
  void validate() const;

  Instance with_terminals(TerminalGroups terminals) const;
  Instance with_multiplier(double multiplier) const;

  friend bool operator==(const Instance& a, const Instance& b);

 private:
  std::shared_ptr<const Graph> graph_;
  std::shared_ptr<const PipeCatalog> pipes_;
  TerminalGroups terminals_;
  std::vector<PipeId> feasible_pipes_;
  std::vector<EdgeId> admissible_edges_;
  std::vector<char> admissible_mask_;
  double multiplier_ = 1.0;
};

/// First stage plus S second-stage scenarios sharing one graph and catalog.
struct TwoStageInstance {
  Instance first_stage;
  std::vector<Instance> scenarios;
  std::vector<double> probabilities;
  /// Pre-existing pairs: free in stage one and available in every scenario.
  EdgePipeSet existing;

  int num_scenarios() const noexcept { return static_cast<int>(scenarios.size()); }

  /// Checks every stage, the shared graph, probabilities (sum 1 within 1e-12,
  /// each >= 0), scenario multipliers (> 1) and the ids in `existing`.
  void validate() const;

  TwoStageInstance with_probabilities(std::vector<double> probs) const;

  friend bool operator==(const TwoStageInstance& a, const TwoStageInstance& b);
};

/// Equal-length probability vector for a two-scenario instance: (1 - rho2, rho2).
std::vector<double> two_scenario_probabilities(double rho2);

}  // namespace ssfp
