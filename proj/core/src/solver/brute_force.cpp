#include "ssfp/solver/brute_force.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "ssfp/error.hpp"
#include "ssfp/feasibility.hpp"

namespace ssfp::solver {

namespace {

using Mask = std::uint32_t;
constexpr double kInf = std::numeric_limits<double>::infinity();

// Pair index i <-> (pipe i % P + 1, edge i / P).
struct Universe {
  int pipes = 0;
  int edges = 0;
  int size() const { return pipes * edges; }
  EdgePipe pair(int i) const { return {i % pipes + 1, i / pipes}; }
  int index(EdgePipe pe) const { return pe.edge * pipes + (pe.pipe - 1); }
  Mask mask_of(const EdgePipeSet& set) const {
    Mask m = 0;
    for (const EdgePipe& pe : set) m |= Mask{1} << index(pe);
    return m;
  }
  EdgePipeSet set_of(Mask m) const {
    EdgePipeSet out;
    for (int i = 0; i < size(); ++i) {
      if (m >> i & 1U) out.insert(pair(i));
    }
    return out;
  }
};

// feasible[m] != 0 iff the pairs in m connect every group of `stage`.
std::vector<char> feasibility_table(const Instance& stage, const Universe& u) {
  const int n = u.size();
  const Graph& g = stage.graph();
  std::vector<int> a(static_cast<size_t>(n), -1), b(static_cast<size_t>(n), -1);
  for (int i = 0; i < n; ++i) {
    const EdgePipe pe = u.pair(i);
    if (!stage.is_feasible_pipe(pe.pipe) || !stage.is_admissible(pe.edge)) continue;
    a[static_cast<size_t>(i)] = g.edge(pe.edge).u;
    b[static_cast<size_t>(i)] = g.edge(pe.edge).v;
  }
  const TerminalGroups& terms = stage.terminals();
  std::vector<char> table(size_t{1} << n, 0);
  std::vector<int> parent(static_cast<size_t>(g.num_vertices()) + 1);
  auto find = [&](int x) {
    while (parent[static_cast<size_t>(x)] != x) {
      parent[static_cast<size_t>(x)] = parent[static_cast<size_t>(parent[static_cast<size_t>(x)])];
      x = parent[static_cast<size_t>(x)];
    }
    return x;
  };
  for (Mask m = 0; m < (Mask{1} << n); ++m) {
    std::iota(parent.begin(), parent.end(), 0);
    for (int i = 0; i < n; ++i) {
      if ((m >> i & 1U) && a[static_cast<size_t>(i)] > 0)
        parent[static_cast<size_t>(find(a[static_cast<size_t>(i)]))] = find(b[static_cast<size_t>(i)]);
    }
    bool ok = true;
    for (int k = 0; k < terms.num_groups() && ok; ++k) {
      const int r = find(terms.root(k));
      for (Vertex t : terms.group(k)) {
        if (find(t) != r) {
          ok = false;
          break;
        }
      }
    }
    table[m] = ok ? 1 : 0;
  }
  return table;
}

std::vector<double> stage_costs(const Instance& stage, const Universe& u) {
  std::vector<double> c(static_cast<size_t>(u.size()));
  for (int i = 0; i < u.size(); ++i) c[static_cast<size_t>(i)] = stage.cost(u.pair(i).pipe, u.pair(i).edge);
  return c;
}

// Cheapest completion of every installed set: g[T] = 0 if T is feasible, else
// min over pairs e outside T of c_e + g[T + e].
struct Completion {
  std::vector<char> feasible;
  std::vector<double> cost;
  std::vector<double> g;

  Completion(const Instance& stage, const Universe& u) : feasible(feasibility_table(stage, u)), cost(stage_costs(stage, u)) {
    const int n = u.size();
    const Mask full = (Mask{1} << n) - 1;
    g.assign(size_t{1} << n, kInf);
    for (Mask m = full;; --m) {
      if (feasible[m]) {
        g[m] = 0.0;
      } else {
        double best = kInf;
        for (int i = 0; i < n; ++i) {
          if (m >> i & 1U) continue;
          best = std::min(best, cost[static_cast<size_t>(i)] + g[m | (Mask{1} << i)]);
        }
        g[m] = best;
      }
      if (m == 0) break;
    }
  }

  // Pairs added by one cheapest completion of m.
  Mask witness(Mask m, int n) const {
    Mask added = 0;
    while (!feasible[m]) {
      int pick = -1;
      for (int i = 0; i < n; ++i) {
        if (m >> i & 1U) continue;
        if (cost[static_cast<size_t>(i)] + g[m | (Mask{1} << i)] == g[m]) {
          pick = i;
          break;
        }
      }
      if (pick < 0) throw std::logic_error("brute force completion has no witness");
      m |= Mask{1} << pick;
      added |= Mask{1} << pick;
    }
    return added;
  }
};

Universe universe_for(const Instance& stage) {
  Universe u{stage.pipes().num_types(), stage.graph().num_edges()};
  if (u.size() > kBruteForceBudget) {
    throw ValidationError("brute force refuses " + std::to_string(u.size()) + " (pipe, edge) pairs; the budget is " +
                          std::to_string(kBruteForceBudget));
  }
  return u;
}

void check_witness(const Instance& stage, const EdgePipeSet& installed) {
  if (!validate_feasible(stage, installed)) throw std::logic_error("brute force produced an infeasible witness");
}

}  // namespace

BruteForceResult brute_force(const Instance& instance, const EdgePipeSet& existing) {
  const Universe u = universe_for(instance);
  check_pair_ids(instance, existing, "existing");
  const Mask base = u.mask_of(existing);
  const Completion c(instance, u);
  if (!std::isfinite(c.g[base])) throw InfeasibleInstanceError("no feasible solution exists");
  BruteForceResult out;
  out.objective = c.g[base];
  out.first_stage = u.set_of(c.witness(base, u.size()));
  check_witness(instance, out.first_stage.united(existing));
  return out;
}

BruteForceResult brute_force(const TwoStageInstance& two_stage, Optimization mode, std::span<const double> probabilities) {
  if (mode == Optimization::kDO) return brute_force(two_stage.first_stage, two_stage.existing);
  if (two_stage.scenarios.empty()) throw ValidationError("at least one scenario is required", "scenarios");
  std::vector<double> rho(probabilities.begin(), probabilities.end());
  if (rho.empty()) rho = two_stage.probabilities;
  if (rho.size() != two_stage.scenarios.size())
    throw ValidationError("expected one probability per scenario", "probabilities");

  const Universe u = universe_for(two_stage.first_stage);
  check_pair_ids(two_stage.first_stage, two_stage.existing, "existing");
  const int n = u.size();
  const Mask full = (Mask{1} << n) - 1;
  const Mask base = u.mask_of(two_stage.existing);
  const Mask free_pairs = full & ~base;

  const std::vector<char> first_feasible = feasibility_table(two_stage.first_stage, u);
  const std::vector<double> first_cost = stage_costs(two_stage.first_stage, u);
  std::vector<Completion> recourse;
  recourse.reserve(two_stage.scenarios.size());
  for (const Instance& s : two_stage.scenarios) recourse.emplace_back(s, u);

  double best = kInf;
  Mask best_mask = 0;
  // Ascending enumeration of the subsets of free_pairs.
  for (Mask x = 0;; x = (x - free_pairs) & free_pairs) {
    double c1 = 0.0;
    for (int i = 0; i < n; ++i) {
      if (x >> i & 1U) c1 += first_cost[static_cast<size_t>(i)];
    }
    if (c1 < best && first_feasible[x | base]) {
      double second = 0.0;
      for (size_t s = 0; s < recourse.size(); ++s) {
        const double g = recourse[s].g[x | base];
        if (mode == Optimization::kRO) {
          second = std::max(second, g);
        } else {
          second += rho[s] * g;
        }
      }
      if (c1 + second < best) {
        best = c1 + second;
        best_mask = x;
      }
    }
    if (x == free_pairs) break;
  }
  if (!std::isfinite(best)) throw InfeasibleInstanceError("no feasible two-stage solution exists");

  BruteForceResult out;
  out.objective = best;
  out.first_stage = u.set_of(best_mask);
  check_witness(two_stage.first_stage, out.first_stage.united(two_stage.existing));
  for (size_t s = 0; s < recourse.size(); ++s) {
    EdgePipeSet added = u.set_of(recourse[s].witness(best_mask | base, n));
    check_witness(two_stage.scenarios[s], added.united(out.first_stage).united(two_stage.existing));
    out.recourse.push_back(std::move(added));
  }
  return out;
}

}  // namespace ssfp::solver
