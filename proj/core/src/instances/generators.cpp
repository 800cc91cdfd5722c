#include <algorithm>
#include <numeric>
#include <string>

#include "ssfp/error.hpp"
#include "ssfp/instances/instances.hpp"

namespace ssfp::instances {

namespace {

std::vector<EdgeId> all_edges(const Graph& g) {
  std::vector<EdgeId> out(static_cast<size_t>(g.num_edges()));
  std::iota(out.begin(), out.end(), 0);
  return out;
}

}  // namespace

Graph grid_graph(int rows, int cols) { return grid_graph_without(rows, cols, {}); }

Graph grid_graph_without(int rows, int cols, const std::vector<int>& removed_labels) {
  if (rows < 1 || cols < 1) throw ValidationError("grid dimensions must be positive");
  const int n = rows * cols;
  std::vector<int> id(static_cast<size_t>(n) + 1, 0);
  for (int r : removed_labels) {
    if (r < 1 || r > n) throw ValidationError("removed vertex " + std::to_string(r) + " is not in the grid");
    id[static_cast<size_t>(r)] = -1;
  }
  std::vector<int> labels;
  for (int v = 1; v <= n; ++v) {
    if (id[static_cast<size_t>(v)] < 0) continue;
    labels.push_back(v);
    id[static_cast<size_t>(v)] = static_cast<int>(labels.size());
  }
  std::vector<Edge> edges;
  auto link = [&](int a, int b) {
    if (id[static_cast<size_t>(a)] > 0 && id[static_cast<size_t>(b)] > 0)
      edges.push_back({id[static_cast<size_t>(a)], id[static_cast<size_t>(b)]});
  };
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) {
      const int v = i * cols + j + 1;
      if (j + 1 < cols) link(v, v + 1);
      if (i + 1 < rows) link(v, v + cols);
    }
  }
  if (removed_labels.empty()) return Graph(n, std::move(edges));
  const int kept = static_cast<int>(labels.size());
  return Graph(kept, std::move(edges), std::move(labels));
}

TwoStageInstance fig2_instance(double rho2) {
  auto graph = std::make_shared<const Graph>(grid_graph_without(6, 6, {11, 15, 21}));
  const std::vector<double> ones(static_cast<size_t>(graph->num_edges()), 1.0);
  const std::vector<double> ratios{1.0, 2.0};
  auto pipes = std::make_shared<const PipeCatalog>(PipeCatalog::scaled(ones, ratios));
  auto v = [&](int label) { return *graph->vertex_with_label(label); };
  const std::vector<EdgeId> edges = all_edges(*graph);

  TwoStageInstance ts;
  ts.first_stage = Instance(graph, pipes, TerminalGroups(graph->num_vertices(), {{v(8), v(22)}}), {1, 2}, edges, 1.0);
  ts.scenarios.emplace_back(graph, pipes, TerminalGroups(graph->num_vertices(), {{v(8), v(22)}}),
                            std::vector<PipeId>{1, 2}, edges, 2.0);
  ts.scenarios.emplace_back(graph, pipes, TerminalGroups(graph->num_vertices(), {{v(8), v(32)}}),
                            std::vector<PipeId>{2}, edges, 2.0);
  ts.probabilities = two_scenario_probabilities(rho2);
  ts.validate();
  return ts;
}

Instance four_cycle_instance() {
  auto graph = std::make_shared<const Graph>(4, std::vector<Edge>{{1, 2}, {2, 3}, {3, 4}, {1, 4}});
  auto pipes = std::make_shared<const PipeCatalog>(1, std::vector<std::vector<double>>(4, {1.0}));
  Instance inst(graph, pipes, TerminalGroups(4, {{1, 3}, {2, 4}}), {1}, all_edges(*graph), 1.0);
  inst.validate();
  return inst;
}

std::uint64_t Rng::below(std::uint64_t n) {
  if (n == 0) throw ValidationError("empty range");
  // Largest multiple of n that fits, to avoid modulo bias.
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t x = next();
  while (x >= limit) x = next();
  return x % n;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

TwoStageInstance random_instance(const RandomSpec& spec, std::uint64_t seed) {
  if (spec.scenarios < 1) throw ValidationError("at least one scenario is required", "scenarios");
  if (spec.groups < 1 || spec.terminals_per_group < 2) throw ValidationError("need at least one group of two terminals");
  if (spec.pipe_ratios.empty()) throw ValidationError("at least one pipe type required", "pipes");
  auto graph = std::make_shared<const Graph>(grid_graph(spec.rows, spec.cols));
  const int needed = spec.groups * spec.terminals_per_group;
  if (needed > graph->num_vertices())
    throw ValidationError(std::to_string(needed) + " terminals requested on " + std::to_string(graph->num_vertices()) +
                          " vertices");

  Rng rng(seed);
  std::vector<double> costs(static_cast<size_t>(graph->num_edges()));
  for (double& c : costs) c = rng.uniform(spec.cost_lo, spec.cost_hi);
  auto pipes = std::make_shared<const PipeCatalog>(PipeCatalog::scaled(costs, spec.pipe_ratios));
  std::vector<PipeId> all_pipes(spec.pipe_ratios.size());
  std::iota(all_pipes.begin(), all_pipes.end(), 1);
  const std::vector<EdgeId> edges = all_edges(*graph);

  auto draw_groups = [&] {
    std::vector<Vertex> order(static_cast<size_t>(graph->num_vertices()));
    std::iota(order.begin(), order.end(), 1);
    rng.shuffle(order);
    std::vector<std::vector<Vertex>> groups(static_cast<size_t>(spec.groups));
    for (int i = 0; i < needed; ++i)
      groups[static_cast<size_t>(i / spec.terminals_per_group)].push_back(order[static_cast<size_t>(i)]);
    return TerminalGroups(graph->num_vertices(), std::move(groups));
  };

  TwoStageInstance ts;
  ts.first_stage = Instance(graph, pipes, draw_groups(), all_pipes, edges, 1.0);
  for (int s = 0; s < spec.scenarios; ++s)
    ts.scenarios.emplace_back(graph, pipes, draw_groups(), all_pipes, edges, spec.multiplier);
  ts.probabilities.assign(static_cast<size_t>(spec.scenarios), 1.0 / spec.scenarios);
  ts.validate();
  return ts;
}

std::vector<SweepSetting> SweepConfig::settings() const {
  std::vector<SweepSetting> out;
  for (int s : scenarios) {
    for (int k : groups) {
      for (int t : terminals_per_group) out.push_back({s, k, t});
    }
  }
  return out;
}

SweepConfig SweepConfig::with_seed_count(int n) {
  SweepConfig c;
  for (int i = 1; i <= n; ++i) c.seeds.push_back(static_cast<std::uint64_t>(i));
  return c;
}

int setting_id(const SweepSetting& s) {
  return ((s.scenarios - 2) * 3 + (s.groups - 1)) * 3 + (s.terminals_per_group - 3);
}

TwoStageInstance random_artificial(const SweepSetting& setting, std::uint64_t seed, int rows, int cols) {
  RandomSpec spec;
  spec.rows = rows;
  spec.cols = cols;
  spec.scenarios = setting.scenarios;
  spec.groups = setting.groups;
  spec.terminals_per_group = setting.terminals_per_group;
  const auto id = static_cast<std::uint64_t>(static_cast<std::uint32_t>(setting_id(setting)));
  return random_instance(spec, splitmix64((id << 32) | (seed & 0xffffffffULL)));
}

}  // namespace ssfp::instances
