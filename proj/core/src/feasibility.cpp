#include "ssfp/feasibility.hpp"

#include <deque>
#include <numeric>
#include <utility>

#include "ssfp/error.hpp"

namespace ssfp {

DisjointSets::DisjointSets(int n) : parent_(static_cast<size_t>(n)), size_(static_cast<size_t>(n), 1) {
  std::iota(parent_.begin(), parent_.end(), 0);
}

int DisjointSets::find(int x) {
  auto i = static_cast<size_t>(x);
  while (parent_[i] != static_cast<int>(i)) {
    parent_[i] = parent_[static_cast<size_t>(parent_[i])];
    i = static_cast<size_t>(parent_[i]);
  }
  return static_cast<int>(i);
}

bool DisjointSets::unite(int a, int b) {
  int ra = find(a);
  int rb = find(b);
  if (ra == rb) return false;
  if (size_[static_cast<size_t>(ra)] < size_[static_cast<size_t>(rb)]) std::swap(ra, rb);
  parent_[static_cast<size_t>(rb)] = ra;
  size_[static_cast<size_t>(ra)] += size_[static_cast<size_t>(rb)];
  return true;
}

void check_pair_ids(const Instance& instance, const EdgePipeSet& pairs, const std::string& what) {
  for (const EdgePipe& pe : pairs) {
    if (!instance.pipes().has_pipe(pe.pipe))
      throw ValidationError("unknown pipe type " + std::to_string(pe.pipe), what);
    if (pe.edge < 0 || pe.edge >= instance.graph().num_edges())
      throw ValidationError("unknown edge index " + std::to_string(pe.edge), what);
  }
}

double cost(const Instance& instance, const EdgePipeSet& existing, const EdgePipeSet& solution) {
  check_pair_ids(instance, existing, "existing");
  check_pair_ids(instance, solution, "solution");
  double total = 0.0;
  for (const EdgePipe& pe : solution) {
    if (!existing.contains(pe)) total += instance.cost(pe.pipe, pe.edge);
  }
  return total;
}

FeasibilityReport validate_feasible(const Instance& instance, const EdgePipeSet& solution) {
  check_pair_ids(instance, solution, "solution");
  const Graph& g = instance.graph();
  DisjointSets components(g.num_vertices() + 1);
  for (const EdgePipe& pe : solution) {
    if (!instance.is_feasible_pipe(pe.pipe) || !instance.is_admissible(pe.edge)) continue;
    const Edge& e = g.edge(pe.edge);
    components.unite(e.u, e.v);
  }
  const TerminalGroups& terms = instance.terminals();
  for (int k = 0; k < terms.num_groups(); ++k) {
    const Vertex r = terms.root(k);
    for (Vertex t : terms.group(k)) {
      if (!components.same(r, t)) {
        return {false, "group " + std::to_string(k + 1) + ": terminal " + std::to_string(g.label(t)) +
                           " is not connected to " + std::to_string(g.label(r))};
      }
    }
  }
  return {true, {}};
}

bool is_connected_within(const Instance& instance, int group_index) {
  const TerminalGroups& terms = instance.terminals();
  if (group_index < 0 || group_index >= terms.num_groups())
    throw ValidationError("group index " + std::to_string(group_index) + " out of range");
  const auto group = terms.group(group_index);
  if (group.size() <= 1) return true;

  const Graph& g = instance.graph();
  std::vector<char> seen(static_cast<size_t>(g.num_vertices()) + 1, 0);
  std::deque<Vertex> queue{group.front()};
  seen[static_cast<size_t>(group.front())] = 1;
  while (!queue.empty()) {
    const Vertex v = queue.front();
    queue.pop_front();
    for (EdgeId e : g.incident(v)) {
      if (!instance.is_admissible(e)) continue;
      const Edge& ed = g.edge(e);
      const Vertex w = (ed.u == v) ? ed.v : ed.u;
      if (!seen[static_cast<size_t>(w)]) {
        seen[static_cast<size_t>(w)] = 1;
        queue.push_back(w);
      }
    }
  }
  for (Vertex t : group) {
    if (!seen[static_cast<size_t>(t)]) return false;
  }
  return true;
}

}  // namespace ssfp
