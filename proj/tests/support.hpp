#pragma once

#include <algorithm>
#include <memory>
#include <numeric>
#include <vector>

#include "ssfp/instance.hpp"
#include "ssfp/instances/instances.hpp"

namespace ssfp::testing {

inline Vertex V(const Graph& g, int label) { return *g.vertex_with_label(label); }

inline EdgeId E(const Graph& g, int a, int b) { return *g.find_edge(V(g, a), V(g, b)); }

inline EdgePipeSet pairs(const Graph& g, int pipe, const std::vector<int>& path) {
  EdgePipeSet out;
  for (size_t i = 0; i + 1 < path.size(); ++i) out.insert({pipe, E(g, path[i], path[i + 1])});
  return out;
}

inline std::vector<EdgeId> all_edges(const Graph& g) {
  std::vector<EdgeId> out(static_cast<size_t>(g.num_edges()));
  std::iota(out.begin(), out.end(), 0);
  return out;
}

// The three routes of the ship deck example, as first-stage pair sets.
inline EdgePipeSet deck_route_short(const Graph& g) { return pairs(g, 1, {8, 9, 10, 16, 22}); }
inline EdgePipeSet deck_route_robust(const Graph& g) {
  return pairs(g, 2, {8, 14, 20, 26, 32}).united(pairs(g, 1, {26, 27, 28, 22}));
}
inline EdgePipeSet deck_route_mixed(const Graph& g) {
  return pairs(g, 2, {8, 14, 20, 26}).united(pairs(g, 1, {26, 27, 28, 22}));
}

// The deck example cut down to the eleven edges used by its three routes, so
// that 2 pipes x 11 edges fits the brute-force budget.
inline TwoStageInstance deck_subgraph(double rho2) {
  const std::vector<std::pair<int, int>> kept = {{8, 9},   {9, 10},  {10, 16}, {16, 22}, {8, 14}, {14, 20},
                                                 {20, 26}, {26, 27}, {27, 28}, {22, 28}, {26, 32}};
  std::vector<int> labels = {8, 9, 10, 14, 16, 20, 22, 26, 27, 28, 32};
  auto id = [&](int label) {
    return static_cast<int>(std::find(labels.begin(), labels.end(), label) - labels.begin()) + 1;
  };
  std::vector<Edge> edges;
  for (auto [a, b] : kept) edges.push_back({std::min(id(a), id(b)), std::max(id(a), id(b))});
  auto graph = std::make_shared<const Graph>(static_cast<int>(labels.size()), edges, labels);
  const std::vector<double> ones(edges.size(), 1.0);
  const std::vector<double> ratios{1.0, 2.0};
  auto pipes = std::make_shared<const PipeCatalog>(PipeCatalog::scaled(ones, ratios));
  const auto all = all_edges(*graph);
  TwoStageInstance ts;
  ts.first_stage = Instance(graph, pipes, TerminalGroups(graph->num_vertices(), {{id(8), id(22)}}), {1, 2}, all, 1.0);
  ts.scenarios.emplace_back(graph, pipes, TerminalGroups(graph->num_vertices(), {{id(8), id(22)}}),
                            std::vector<PipeId>{1, 2}, all, 2.0);
  ts.scenarios.emplace_back(graph, pipes, TerminalGroups(graph->num_vertices(), {{id(8), id(32)}}),
                            std::vector<PipeId>{2}, all, 2.0);
  ts.probabilities = two_scenario_probabilities(rho2);
  ts.validate();
  return ts;
}

// Small seeded 3x3 two-stage instance for oracle comparisons. The shape
// (groups, terminals, pipe count) is drawn from the seed as well.
inline TwoStageInstance small_grid(std::uint64_t seed, int pipes = 1) {
  instances::Rng shape(instances::splitmix64(seed));
  instances::RandomSpec spec;
  spec.rows = 3;
  spec.cols = 3;
  spec.scenarios = 2;
  spec.groups = 1 + static_cast<int>(shape.below(2));
  spec.terminals_per_group = 2 + static_cast<int>(shape.below(2));
  spec.pipe_ratios = pipes == 1 ? std::vector<double>{1.0} : std::vector<double>{1.0, 2.0};
  return instances::random_instance(spec, seed);
}

inline TwoStageInstance four_cycle_two_stage() {
  const Instance base = instances::four_cycle_instance();
  TwoStageInstance ts;
  ts.first_stage = base;
  ts.scenarios = {base.with_multiplier(2.0)};
  ts.probabilities = {1.0};
  return ts;
}

}  // namespace ssfp::testing
