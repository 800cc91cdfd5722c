#include "ssfp/solver/branch_and_bound.hpp"

#include <chrono>
#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <queue>
#include <vector>

#include "lp_engine.hpp"
#include "ssfp/error.hpp"

namespace ssfp::solver {

namespace {

struct BoundChange {
  int var;
  double lower;
  double upper;
  std::shared_ptr<const BoundChange> prev;
};

using ChangePtr = std::shared_ptr<const BoundChange>;
using BasisPtr = std::shared_ptr<const std::vector<std::uint8_t>>;

struct Node {
  long long id = 0;
  long long parent = -1;
  int depth = 0;
  double bound = -milp::kInfinity;
  ChangePtr changes;
  BasisPtr basis;
  // Branching that created the node, for pseudocost updates.
  int branch_var = -1;
  bool branch_up = false;
  double branch_dist = 0.0;
};

struct NodeOrder {
  // std::priority_queue pops the "largest" element, so this returns true
  // when a should be explored after b.
  bool operator()(const Node& a, const Node& b) const {
    if (a.bound != b.bound) return a.bound > b.bound;
    if (a.depth != b.depth) return a.depth < b.depth;
    return a.id > b.id;
  }
};

double fractionality(double v) { return std::abs(v - std::round(v)); }

class BranchAndBound {
 public:
  BranchAndBound(const milp::Model& model, const BnbConfig& config)
      : model_(model), config_(config), relaxed_(milp::relax(model)), engine_(relaxed_) {
    const auto vars = model.variables();
    for (size_t j = 0; j < vars.size(); ++j) {
      root_lo_.push_back(vars[j].lower);
      root_up_.push_back(vars[j].upper);
      if (vars[j].kind == milp::VarKind::kBinary) binaries_.push_back(static_cast<int>(j));
      if (vars[j].implied_integer) implied_.push_back(static_cast<int>(j));
      if (vars[j].kind == milp::VarKind::kBinary || vars[j].implied_integer) integers_.push_back(static_cast<int>(j));
    }
    pc_sum_[0].assign(vars.size(), 0.0);
    pc_sum_[1].assign(vars.size(), 0.0);
    pc_count_[0].assign(vars.size(), 0);
    pc_count_[1].assign(vars.size(), 0);
  }

  milp::Solution run() {
    const auto start = std::chrono::steady_clock::now();
    std::priority_queue<Node, std::vector<Node>, NodeOrder> open;
    open.push(Node{next_id_++, -1, 0, -milp::kInfinity, nullptr, nullptr});
    bool failed = false;
    long long last_solved = -1;

    while (!open.empty()) {
      if (nodes_ >= config_.node_limit) break;
      Node node = open.top();
      if (node.bound >= prune_level()) {
        // Best-first: every remaining node is dominated too.
        while (!open.empty()) open.pop();
        break;
      }
      open.pop();

      apply(node.changes);
      if (node.parent != last_solved && node.basis) engine_.load_packed_basis(*node.basis);
      detail::LpResult res = engine_.solve();
      if (res == detail::LpResult::kNumericalFailure || res == detail::LpResult::kIterationLimit) {
        // One retry from scratch before giving up on the node.
        engine_.load_packed_basis(slack_basis());
        res = engine_.solve();
      }
      ++nodes_;
      last_solved = node.id;
      if (node.parent < 0) root_bound_ = res == detail::LpResult::kOptimal ? engine_.objective() : milp::kInfinity;

      if (res == detail::LpResult::kInfeasible) continue;
      if (res == detail::LpResult::kUnbounded) {
        unbounded_ = true;
        break;
      }
      if (res != detail::LpResult::kOptimal) {
        failed = true;
        continue;
      }
      const double obj = engine_.objective();
      if (node.branch_var >= 0) record_pseudocost(node.branch_var, node.branch_up, (obj - node.bound) / node.branch_dist);
      if (obj >= prune_level()) continue;

      auto basis = std::make_shared<const std::vector<std::uint8_t>>(engine_.packed_basis());
      const int branch = config_.branching == Branching::kReliability ? pick_reliable(obj, *basis) : pick_branching_variable();
      if (branch == kPrune) continue;
      if (branch < 0) {
        accept_incumbent();
        continue;
      }

      ChangePtr base = reduced_cost_fixings(node.changes, obj);
      const double v = engine_.value(branch);
      const double down_up = std::floor(v);
      const double up_lo = std::ceil(v);
      const auto bj = static_cast<size_t>(branch);
      auto down = std::make_shared<const BoundChange>(BoundChange{branch, current_lo_at(bj), down_up, base});
      auto up = std::make_shared<const BoundChange>(BoundChange{branch, up_lo, current_up_at(bj), base});
      // The child on the side of the nearer integer is created first.
      auto child = [&](bool up_side) {
        return Node{next_id_++, node.id, node.depth + 1, obj, up_side ? up : down, basis, branch, up_side,
                    up_side ? up_lo - v : v - down_up};
      };
      // The child on the side of the nearer integer is created first.
      const bool up_first = v - down_up >= up_lo - v;
      open.push(child(up_first));
      open.push(child(!up_first));
    }

    milp::Solution sol;
    sol.node_count = nodes_;
    sol.lp_iterations = engine_.iterations();
    sol.root_bound = root_bound_;
    double open_bound = milp::kInfinity;
    const bool limit_hit = !open.empty();
    while (!open.empty()) {
      open_bound = std::min(open_bound, open.top().bound);
      open.pop();
    }
    if (unbounded_) {
      sol.status = milp::SolveStatus::kUnbounded;
      sol.objective = -milp::kInfinity;
    } else if (limit_hit) {
      sol.status = milp::SolveStatus::kNodeLimit;
    } else if (failed) {
      sol.status = milp::SolveStatus::kNumericalFailure;
    } else if (has_incumbent_) {
      sol.status = milp::SolveStatus::kOptimal;
    } else {
      sol.status = milp::SolveStatus::kInfeasible;
    }
    if (has_incumbent_) {
      sol.values = incumbent_;
      sol.objective = incumbent_obj_;
      sol.bound = sol.status == milp::SolveStatus::kOptimal ? incumbent_obj_ : std::min(open_bound, incumbent_obj_);
    } else {
      sol.bound = sol.status == milp::SolveStatus::kInfeasible ? milp::kInfinity : open_bound;
    }
    sol.solve_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return sol;
  }

 private:
  // Bound at or above which a node cannot hold a better solution.
  double prune_level() const {
    double level = milp::kInfinity;
    if (config_.cutoff < milp::kInfinity) level = config_.cutoff + 1e-6 * std::max(1.0, std::abs(config_.cutoff));
    if (has_incumbent_) level = std::min(level, incumbent_obj_ - config_.absolute_gap);
    return level;
  }

  double current_lo_at(size_t j) const { return engine_.lower(static_cast<int>(j)); }
  double current_up_at(size_t j) const { return engine_.upper(static_cast<int>(j)); }

  std::vector<std::uint8_t> slack_basis() const {
    const int n = engine_.num_structurals();
    const int m = engine_.num_rows();
    std::vector<std::uint8_t> packed(static_cast<size_t>(n + m + 3) / 4, 0);
    for (int j = 0; j < n; ++j) {
      const auto u = static_cast<size_t>(j);
      const double lo = engine_.lower(j);
      const double up = engine_.upper(j);
      const auto cost = model_.variables()[u].objective;
      unsigned st = 1;  // at lower
      if (!std::isfinite(lo) || (cost < 0.0 && std::isfinite(up))) st = std::isfinite(up) ? 2U : 3U;
      packed[u / 4] |= static_cast<std::uint8_t>(st << (2 * (j % 4)));
    }
    return packed;
  }

  void apply(const ChangePtr& changes) {
    for (int j : touched_) engine_.set_bounds(j, root_lo_[static_cast<size_t>(j)], root_up_[static_cast<size_t>(j)]);
    touched_.clear();
    std::vector<const BoundChange*> chain;
    for (const BoundChange* c = changes.get(); c != nullptr; c = c->prev.get()) chain.push_back(c);
    for (auto it = chain.rbegin(); it != chain.rend(); ++it) {
      engine_.set_bounds((*it)->var, (*it)->lower, (*it)->upper);
      touched_.push_back((*it)->var);
    }
  }

  int pick_branching_variable() const {
    for (const std::vector<int>* group : {&binaries_, &implied_}) {
      int best = -1;
      double best_frac = config_.integrality_tol;
      for (int j : *group) {
        const double f = fractionality(engine_.value(j));
        if (f > best_frac) {
          best_frac = f;
          best = j;
        }
      }
      if (best >= 0) return best;
    }
    return -1;
  }

  static constexpr int kPrune = -2;

  void record_pseudocost(int j, bool up, double gain_per_unit) {
    if (!std::isfinite(gain_per_unit)) return;
    const int side = up ? 1 : 0;
    pc_sum_[side][static_cast<size_t>(j)] += std::max(gain_per_unit, 0.0);
    ++pc_count_[side][static_cast<size_t>(j)];
    pc_total_[side] += std::max(gain_per_unit, 0.0);
    ++pc_total_count_[side];
  }

  double pseudocost(int j, int side) const {
    const auto u = static_cast<size_t>(j);
    if (pc_count_[side][u] > 0) return pc_sum_[side][u] / pc_count_[side][u];
    return pc_total_count_[side] > 0 ? pc_total_[side] / static_cast<double>(pc_total_count_[side]) : 1.0;
  }

  static double product_score(double down_gain, double up_gain) {
    constexpr double eps = 1e-6;
    return std::max(down_gain, eps) * std::max(up_gain, eps);
  }

  // Objective change of one child, from an iteration-limited dual solve;
  // infinity when the child LP is infeasible, NaN when the trial failed.
  double trial_gain(int j, double lower, double upper, double obj, const std::vector<std::uint8_t>& basis) {
    const double lo = engine_.lower(j);
    const double up = engine_.upper(j);
    engine_.set_bounds(j, lower, upper);
    engine_.load_packed_basis(basis);
    const detail::LpResult r = engine_.solve();
    double gain = std::numeric_limits<double>::quiet_NaN();
    if (r == detail::LpResult::kInfeasible) {
      gain = milp::kInfinity;
    } else if (r == detail::LpResult::kOptimal || r == detail::LpResult::kIterationLimit) {
      gain = std::max(engine_.objective() - obj, 0.0);
    }
    engine_.set_bounds(j, lo, up);
    return gain;
  }

  int pick_reliable(double obj, const std::vector<std::uint8_t>& basis) {
    struct Candidate {
      int j;
      double value;
      double score;
    };
    std::vector<Candidate> cands;
    for (int j : integers_) {
      const double v = engine_.value(j);
      if (fractionality(v) <= config_.integrality_tol) continue;
      const double fd = v - std::floor(v);
      const double fu = std::ceil(v) - v;
      cands.push_back({j, v, product_score(pseudocost(j, 0) * fd, pseudocost(j, 1) * fu)});
    }
    if (cands.empty()) return -1;
    std::stable_sort(cands.begin(), cands.end(),
                     [](const Candidate& a, const Candidate& b) { return a.score > b.score; });

    int best = -1;
    double best_score = -1.0;
    int trials = 0;
    int since_improvement = 0;
    bool touched_lp = false;
    engine_.set_iteration_limit(config_.strong_iterations);
    for (const Candidate& c : cands) {
      const auto u = static_cast<size_t>(c.j);
      const bool reliable = std::min(pc_count_[0][u], pc_count_[1][u]) >= config_.reliability;
      double score = c.score;
      if (!reliable && trials < config_.strong_candidates) {
        ++trials;
        touched_lp = true;
        const double fd = c.value - std::floor(c.value);
        const double fu = std::ceil(c.value) - c.value;
        const double gd = trial_gain(c.j, engine_.lower(c.j), std::floor(c.value), obj, basis);
        const double gu = trial_gain(c.j, std::ceil(c.value), engine_.upper(c.j), obj, basis);
        if (!std::isnan(gd) && std::isfinite(gd)) record_pseudocost(c.j, false, gd / fd);
        if (!std::isnan(gu) && std::isfinite(gu)) record_pseudocost(c.j, true, gu / fu);
        const bool cut_down = gd == milp::kInfinity ||
                              (!std::isnan(gd) && obj + gd >= prune_level());
        const bool cut_up = gu == milp::kInfinity ||
                            (!std::isnan(gu) && obj + gu >= prune_level());
        if (gd == milp::kInfinity && gu == milp::kInfinity) {
          best = kPrune;
          break;
        }
        if (cut_down || cut_up) {
          // One child is already decided; branching here costs one cheap node.
          best = c.j;
          break;
        }
        score = product_score(std::isnan(gd) ? pseudocost(c.j, 0) * fd : gd, std::isnan(gu) ? pseudocost(c.j, 1) * fu : gu);
      }
      if (score > best_score) {
        best_score = score;
        best = c.j;
        since_improvement = 0;
      } else if (++since_improvement >= 8) {
        break;
      }
    }
    engine_.set_iteration_limit(0);
    if (touched_lp && best != kPrune) {
      // Back to the node's optimal basis so values and reduced costs match.
      engine_.load_packed_basis(basis);
      if (engine_.solve() != detail::LpResult::kOptimal) return cands.front().j;
    }
    return best;
  }

  ChangePtr reduced_cost_fixings(ChangePtr base, double obj) const {
    const double level = prune_level();
    if (level == milp::kInfinity) return base;
    const double slack = level - obj;
    for (int j : binaries_) {
      if (engine_.lower(j) == engine_.upper(j)) continue;
      const detail::VarStatus st = engine_.status(j);
      const double dj = engine_.reduced_cost(j);
      if (st == detail::VarStatus::kAtLower && dj > slack) {
        base = std::make_shared<const BoundChange>(BoundChange{j, 0.0, 0.0, base});
      } else if (st == detail::VarStatus::kAtUpper && -dj > slack) {
        base = std::make_shared<const BoundChange>(BoundChange{j, 1.0, 1.0, base});
      }
    }
    return base;
  }

  void accept_incumbent() {
    std::vector<double> values = engine_.values();
    const auto vars = model_.variables();
    for (size_t j = 0; j < values.size(); ++j) {
      if (vars[j].kind == milp::VarKind::kBinary || vars[j].implied_integer) values[j] = std::round(values[j]);
    }
    const double obj = model_.evaluate(values);
    if (!has_incumbent_ || obj < incumbent_obj_) {
      incumbent_ = std::move(values);
      incumbent_obj_ = obj;
      has_incumbent_ = true;
    }
  }

  const milp::Model& model_;
  BnbConfig config_;
  milp::Model relaxed_;
  detail::LpEngine engine_;
  std::vector<double> root_lo_, root_up_;
  std::vector<int> binaries_, implied_, integers_;
  // Pseudocosts, [0] down and [1] up: summed gain per unit and observations.
  std::vector<double> pc_sum_[2];
  std::vector<int> pc_count_[2];
  double pc_total_[2] = {0.0, 0.0};
  long long pc_total_count_[2] = {0, 0};
  std::vector<int> touched_;
  long long next_id_ = 0;
  long long nodes_ = 0;
  double root_bound_ = -milp::kInfinity;
  bool has_incumbent_ = false;
  bool unbounded_ = false;
  double incumbent_obj_ = milp::kInfinity;
  std::vector<double> incumbent_;
};

}  // namespace

milp::Solution solve_milp(const milp::Model& model, const BnbConfig& config) {
  if (config.node_limit < 1) throw ValidationError("node_limit must be at least 1");
  BranchAndBound bnb(model, config);
  return bnb.run();
}

}  // namespace ssfp::solver
