#include "ssfp/instance.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "ssfp/error.hpp"
#include "ssfp/feasibility.hpp"

namespace ssfp {

PipeCatalog::PipeCatalog(int num_types, const std::vector<std::vector<double>>& per_edge)
    : num_types_(num_types), num_edges_(static_cast<int>(per_edge.size())) {
  if (num_types_ < 1) throw ValidationError("at least one pipe type required", "pipes.num_types");
  costs_.reserve(per_edge.size() * static_cast<size_t>(num_types_));
  for (size_t e = 0; e < per_edge.size(); ++e) {
    const std::string where = "pipes.base_costs.per_edge[" + std::to_string(e) + "]";
    if (static_cast<int>(per_edge[e].size()) != num_types_)
      throw ValidationError("expected one cost per pipe type", where);
    for (double c : per_edge[e]) {
      if (!(c > 0.0) || !std::isfinite(c)) throw ValidationError("costs must be positive and finite", where);
      costs_.push_back(c);
    }
  }
}

PipeCatalog PipeCatalog::scaled(std::span<const double> edge_costs, std::span<const double> ratios) {
  std::vector<std::vector<double>> per_edge;
  per_edge.reserve(edge_costs.size());
  for (double c : edge_costs) {
    std::vector<double> row;
    row.reserve(ratios.size());
    for (double r : ratios) row.push_back(c * r);
    per_edge.push_back(std::move(row));
  }
  return PipeCatalog(static_cast<int>(ratios.size()), per_edge);
}

TerminalGroups::TerminalGroups(int num_vertices, std::vector<std::vector<Vertex>> groups)
    : groups_(std::move(groups)), group_of_(static_cast<size_t>(std::max(num_vertices, 0)), -1) {
  for (size_t k = 0; k < groups_.size(); ++k) {
    auto& g = groups_[k];
    const std::string where = "groups[" + std::to_string(k) + "]";
    std::sort(g.begin(), g.end());
    if (std::adjacent_find(g.begin(), g.end()) != g.end())
      throw ValidationError("repeated vertex inside a group", where);
    if (g.size() < 2) throw ValidationError("a terminal group needs at least two vertices", where);
    for (Vertex v : g) {
      if (v < 1 || v > num_vertices) throw ValidationError("vertex " + std::to_string(v) + " out of range", where);
      int& owner = group_of_[static_cast<size_t>(v - 1)];
      if (owner >= 0)
        throw ValidationError("vertex " + std::to_string(v) + " already belongs to group " + std::to_string(owner), where);
      owner = static_cast<int>(k);
    }
  }
}

int TerminalGroups::group_of(Vertex v) const {
  if (v < 1 || v > static_cast<int>(group_of_.size())) return -1;
  return group_of_[static_cast<size_t>(v - 1)];
}

bool TerminalGroups::is_root(Vertex v) const {
  const int k = group_of(v);
  return k >= 0 && root(k) == v;
}

int TerminalGroups::num_terminals() const noexcept {
  int n = 0;
  for (const auto& g : groups_) n += static_cast<int>(g.size());
  return n;
}

std::vector<Vertex> TerminalGroups::terminals_from(int k) const {
  std::vector<Vertex> out;
  for (int l = k; l < num_groups(); ++l) {
    for (Vertex t : groups_[static_cast<size_t>(l)]) {
      if (l == k && t == root(k)) continue;
      out.push_back(t);
    }
  }
  return out;
}

std::vector<Vertex> TerminalGroups::non_root_terminals() const {
  std::vector<Vertex> out;
  for (const auto& g : groups_) out.insert(out.end(), g.begin() + 1, g.end());
  return out;
}

std::vector<Vertex> TerminalGroups::steiner_vertices() const {
  std::vector<Vertex> out;
  for (size_t i = 0; i < group_of_.size(); ++i) {
    if (group_of_[i] < 0) out.push_back(static_cast<Vertex>(i) + 1);
  }
  return out;
}

EdgePipeSet EdgePipeSet::united(const EdgePipeSet& other) const {
  EdgePipeSet out = *this;
  out.pairs_.insert(other.pairs_.begin(), other.pairs_.end());
  return out;
}

EdgePipeSet EdgePipeSet::intersected(const EdgePipeSet& other) const {
  EdgePipeSet out;
  std::set_intersection(pairs_.begin(), pairs_.end(), other.pairs_.begin(), other.pairs_.end(),
                        std::inserter(out.pairs_, out.pairs_.end()));
  return out;
}

EdgePipeSet EdgePipeSet::minus(const EdgePipeSet& other) const {
  EdgePipeSet out;
  std::set_difference(pairs_.begin(), pairs_.end(), other.pairs_.begin(), other.pairs_.end(),
                      std::inserter(out.pairs_, out.pairs_.end()));
  return out;
}

Instance::Instance(std::shared_ptr<const Graph> graph, std::shared_ptr<const PipeCatalog> pipes,
                   TerminalGroups terminals, std::vector<PipeId> feasible_pipes,
                   std::vector<EdgeId> admissible_edges, double cost_multiplier)
    : graph_(std::move(graph)),
      pipes_(std::move(pipes)),
      terminals_(std::move(terminals)),
      feasible_pipes_(std::move(feasible_pipes)),
      admissible_edges_(std::move(admissible_edges)),
      multiplier_(cost_multiplier) {
  if (!graph_ || !pipes_) throw ValidationError("instance requires a graph and a pipe catalog");
  if (pipes_->num_edges() != graph_->num_edges())
    throw ValidationError("pipe catalog has costs for " + std::to_string(pipes_->num_edges()) +
                              " edges but the graph has " + std::to_string(graph_->num_edges()),
                          "pipes.base_costs");
  for (const auto& g : terminals_.groups()) {
    for (Vertex v : g) {
      if (!graph_->has_vertex(v)) throw ValidationError("terminal " + std::to_string(v) + " not in graph", "groups");
    }
  }
  std::sort(feasible_pipes_.begin(), feasible_pipes_.end());
  feasible_pipes_.erase(std::unique(feasible_pipes_.begin(), feasible_pipes_.end()), feasible_pipes_.end());
  for (PipeId p : feasible_pipes_) {
    if (!pipes_->has_pipe(p)) throw ValidationError("unknown pipe type " + std::to_string(p), "feasible_pipes");
  }
  std::sort(admissible_edges_.begin(), admissible_edges_.end());
  admissible_edges_.erase(std::unique(admissible_edges_.begin(), admissible_edges_.end()), admissible_edges_.end());
  admissible_mask_.assign(static_cast<size_t>(graph_->num_edges()), 0);
  for (EdgeId e : admissible_edges_) {
    if (e < 0 || e >= graph_->num_edges()) throw ValidationError("unknown edge index " + std::to_string(e), "admissible_edges");
    admissible_mask_[static_cast<size_t>(e)] = 1;
  }
  if (!std::isfinite(multiplier_)) throw ValidationError("multiplier must be finite", "multiplier");
}

bool Instance::is_feasible_pipe(PipeId p) const {
  return std::binary_search(feasible_pipes_.begin(), feasible_pipes_.end(), p);
}

std::vector<ArcId> Instance::admissible_arcs() const {
  std::vector<ArcId> arcs;
  arcs.reserve(2 * admissible_edges_.size());
  for (EdgeId e : admissible_edges_) {
    arcs.push_back(2 * e);
    arcs.push_back(2 * e + 1);
  }
  return arcs;
}

void Instance::validate() const {
  if (feasible_pipes_.empty()) throw ValidationError("no feasible pipe types", "feasible_pipes");
  if (admissible_edges_.empty()) throw ValidationError("no admissible edges", "admissible_edges");
  if (multiplier_ < 1.0) throw ValidationError("cost multiplier must be at least 1", "multiplier");
  for (int k = 0; k < terminals_.num_groups(); ++k) {
    if (!is_connected_within(*this, k))
      throw InfeasibleInstanceError("terminal group " + std::to_string(k + 1) + " is disconnected over admissible edges",
                                    "groups[" + std::to_string(k) + "]");
  }
}

Instance Instance::with_terminals(TerminalGroups terminals) const {
  Instance copy = *this;
  copy.terminals_ = std::move(terminals);
  return copy;
}

Instance Instance::with_multiplier(double multiplier) const {
  Instance copy = *this;
  copy.multiplier_ = multiplier;
  return copy;
}

bool operator==(const Instance& a, const Instance& b) {
  const bool same_graph = a.graph_ == b.graph_ || (a.graph_ && b.graph_ && *a.graph_ == *b.graph_);
  const bool same_pipes = a.pipes_ == b.pipes_ || (a.pipes_ && b.pipes_ && *a.pipes_ == *b.pipes_);
  return same_graph && same_pipes && a.terminals_ == b.terminals_ && a.feasible_pipes_ == b.feasible_pipes_ &&
         a.admissible_edges_ == b.admissible_edges_ && a.multiplier_ == b.multiplier_;
}

void TwoStageInstance::validate() const {
  first_stage.validate();
  if (scenarios.size() != probabilities.size())
    throw ValidationError("one probability per scenario required", "scenarios");
  double total = 0.0;
  for (size_t s = 0; s < scenarios.size(); ++s) {
    const std::string where = "scenarios[" + std::to_string(s) + "]";
    const Instance& sc = scenarios[s];
    if (sc.graph_ptr() != first_stage.graph_ptr() && !(sc.graph() == first_stage.graph()))
      throw ValidationError("scenario graph differs from the first-stage graph", where);
    if (sc.pipes_ptr() != first_stage.pipes_ptr() && !(sc.pipes() == first_stage.pipes()))
      throw ValidationError("scenario pipe catalog differs from the first stage", where);
    if (!(sc.cost_multiplier() > 1.0)) throw ValidationError("scenario multiplier must exceed 1", where + ".multiplier");
    if (!(probabilities[s] >= 0.0)) throw ValidationError("negative probability", where + ".probability");
    try {
      sc.validate();
    } catch (const InfeasibleInstanceError& e) {
      throw InfeasibleInstanceError(e.what(), where);
    } catch (const ValidationError& e) {
      throw ValidationError(e.what(), where);
    }
    total += probabilities[s];
  }
  if (!scenarios.empty() && std::abs(total - 1.0) > 1e-12)
    throw ValidationError("probabilities sum to " + std::to_string(total) + ", expected 1", "scenarios");
  check_pair_ids(first_stage, existing, "existing");
}

TwoStageInstance TwoStageInstance::with_probabilities(std::vector<double> probs) const {
  if (probs.size() != scenarios.size()) throw ValidationError("one probability per scenario required", "probabilities");
  double total = 0.0;
  for (double q : probs) {
    if (!(q >= 0.0)) throw ValidationError("negative probability", "probabilities");
    total += q;
  }
  if (!scenarios.empty() && std::abs(total - 1.0) > 1e-12)
    throw ValidationError("probabilities sum to " + std::to_string(total) + ", expected 1", "probabilities");
  TwoStageInstance copy = *this;
  copy.probabilities = std::move(probs);
  return copy;
}

bool operator==(const TwoStageInstance& a, const TwoStageInstance& b) {
  return a.first_stage == b.first_stage && a.scenarios == b.scenarios && a.probabilities == b.probabilities &&
         a.existing == b.existing;
}

std::vector<double> two_scenario_probabilities(double rho2) { return {1.0 - rho2, rho2}; }

}  // namespace ssfp
