// Acceptance runner: one PASS/FAIL line per criterion, exit status 1 if any
// hard check fails. Sweep size comes from the environment:
//   SSFP_ACCEPT_SETTINGS  "all" or "S,K,T;S,K,T;..."   (default: see kDefaultSettings)
//   SSFP_ACCEPT_SEEDS     seeds 1..N per setting         (default 2)
//   SSFP_ACCEPT_NODE_LIMIT  per-solve node limit         (default 20000)
//   SSFP_THREADS          worker threads

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <queue>
#include <sstream>
#include <string>
#include <vector>

#include "ssfp/error.hpp"
#include "ssfp/experiments/experiments.hpp"
#include "ssfp/feasibility.hpp"
#include "ssfp/instances/instances.hpp"
#include "ssfp/milp/lp_format.hpp"
#include "ssfp/models/models.hpp"
#include "ssfp/solver/branch_and_bound.hpp"
#include "ssfp/solver/brute_force.hpp"
#include "ssfp/solver/simplex.hpp"
#include "support.hpp"

using namespace ssfp;
namespace ex = ssfp::experiments;

namespace {

// Settings whose records finish in well under a minute on one core.
const char* const kDefaultSettings = "2,1,3;2,1,4;2,2,4;3,1,3;3,1,4;4,1,3";

using Clock = std::chrono::steady_clock;

int hard_failures = 0;

struct Check {
  std::string detail;
  bool ok = true;
  void require(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      if (!detail.empty()) detail += "; ";
      detail += what;
    }
  }
};

void report(int id, const char* title, const Check& c, double seconds, double budget) {
  const bool in_time = seconds <= budget;
  const bool pass = c.ok && in_time;
  if (!pass) ++hard_failures;
  std::printf("[%s] criterion %d: %s (%.1f s, budget %.0f s)%s%s\n", pass ? "PASS" : "FAIL", id, title, seconds, budget,
              c.detail.empty() ? "" : " -- ", c.detail.c_str());
  if (!in_time) std::printf("       over the time budget\n");
  std::fflush(stdout);
}

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

const Optimization kOpts[] = {Optimization::kDO, Optimization::kRO, Optimization::kSO};
const Flow kFlows[] = {Flow::kUndirected, Flow::kDirected};

milp::Solution solve(const models::BuiltModel& bm) { return solver::solve_milp(bm.milp); }

// ---------------------------------------------------------------------------

void criterion1() {
  const auto t0 = Clock::now();
  Check c;
  const double rhos[] = {0.0, 0.45, 0.5, 1.0};
  const double so_expected[] = {4.0, 10.8, 11.0, 11.0};
  for (int i = 0; i < 4; ++i) {
    const auto ts = instances::fig2_instance(rhos[i]);
    for (int o = 0; o < 3; ++o) {
      const double want = o == 0 ? 4.0 : o == 1 ? 11.0 : so_expected[i];
      for (Flow f : kFlows) {
        const auto s = solve(models::build(ts, {kOpts[o], f}));
        c.require(s.status == milp::SolveStatus::kOptimal && std::abs(s.objective - want) <= 1e-7,
                  to_string(ModelKind{kOpts[o], f}) + " at rho2 " + fmt(rhos[i]) + " gave " + fmt(s.objective) +
                      ", expected " + fmt(want));
      }
    }
  }
  const auto table = ex::cost_curves(instances::fig2_instance(), {0.0, 1.0});
  c.require(table.intersections.size() == 2, "expected two intersections");
  if (table.intersections.size() == 2) {
    c.require(std::abs(table.intersections[0] - 5.0 / 12.0) <= 1e-9, "first intersection " + fmt(table.intersections[0]));
    c.require(std::abs(table.intersections[1] - 0.5) <= 1e-9, "second intersection " + fmt(table.intersections[1]));
  }
  if (c.ok) c.detail = "DO 4, RO 11, SO {4, 10.8, 11, 11}, intersections 5/12 and 1/2";
  report(1, "worked example exactness", c, since(t0), 10);
}

void criterion2() {
  const auto t0 = Clock::now();
  Check c;
  double vss_min = INFINITY, vss_max = -INFINITY, ratio_max = 0, argmax = -1;
  for (double rho : ex::parse_grid("0:1:0.01")) {
    const ex::VssReport r = ex::vss_report(instances::fig2_instance(rho));
    vss_min = std::min(vss_min, r.vss());
    if (r.vss() > vss_max + 1e-12) vss_max = r.vss(), argmax = rho;
    ratio_max = std::max(ratio_max, r.vss() / r.so_optimum);
  }
  c.require(std::abs(vss_min) <= 1e-7, "minimum VSS " + fmt(vss_min));
  c.require(std::abs(vss_max - 9) <= 1e-7, "maximum VSS " + fmt(vss_max));
  c.require(std::abs(argmax - 1) <= 1e-9, "maximum at rho2 " + fmt(argmax));
  c.require(std::abs(ratio_max - 0.818) <= 0.01, "max VSS/SO " + fmt(ratio_max));
  c.detail = (c.ok ? "" : c.detail + "; ") + "VSS in [" + fmt(vss_min) + ", " + fmt(vss_max) + "], max at rho2 " +
             fmt(argmax) + ", max VSS/SO " + fmt(ratio_max);
  report(2, "VSS range", c, since(t0), 60);
}

void criterion3() {
  const auto t0 = Clock::now();
  Check c;
  const Instance cyc = instances::four_cycle_instance();
  const auto u = models::build_do_u(cyc);
  const auto d = models::build_do_d(cyc);
  const double ip = solve(u).objective;
  const double ip_d = solve(d).objective;
  const double lu = solver::solve_lp(milp::relax(u.milp)).objective;
  const double ld = solver::solve_lp(milp::relax(d.milp)).objective;
  c.require(std::abs(ip - 3) <= 1e-9 && std::abs(ip_d - 3) <= 1e-9, "integer optimum " + fmt(ip) + "/" + fmt(ip_d));
  c.require(lu <= 2 + 1e-7, "LP(DO-U) " + fmt(lu));
  c.require(ld >= lu + 0.1, "LP(DO-D) " + fmt(ld) + " not above LP(DO-U) + 0.1");
  // Random corpus: every stage of the 200 oracle instances.
  int checked = 0;
  double worst = INFINITY;
  for (std::uint64_t seed = 1; seed <= 200; ++seed) {
    const auto ts = testing::small_grid(seed);
    std::vector<const Instance*> stages = {&ts.first_stage};
    for (const auto& s : ts.scenarios) stages.push_back(&s);
    for (const Instance* st : stages) {
      const double a = solver::solve_lp(milp::relax(models::build_do_u(*st).milp)).objective;
      const double b = solver::solve_lp(milp::relax(models::build_do_d(*st).milp)).objective;
      worst = std::min(worst, b - a);
      ++checked;
      if (b < a - 1e-7) c.require(false, "seed " + std::to_string(seed) + ": LP(DO-D) " + fmt(b) + " < LP(DO-U) " + fmt(a));
    }
  }
  c.detail = (c.ok ? "" : c.detail + "; ") + "IP 3, LP(DO-U) " + fmt(lu) + ", LP(DO-D) " + fmt(ld) + "; " +
             std::to_string(checked) + " corpus LPs, min LP(D)-LP(U) " + fmt(worst);
  report(3, "relaxation tightness", c, since(t0), 5);
}

void criterion4() {
  const auto t0 = Clock::now();
  Check c;
  int compared = 0;
  double worst = 0;
  for (std::uint64_t seed = 1; seed <= 200; ++seed) {
    const auto ts = testing::small_grid(seed);
    for (Optimization o : kOpts) {
      const double bf = solver::brute_force(ts, o).objective;
      for (Flow f : kFlows) {
        const auto s = solve(models::build(ts, {o, f}));
        const double diff = std::abs(s.objective - bf);
        worst = std::max(worst, diff);
        ++compared;
        if (s.status != milp::SolveStatus::kOptimal || diff > 1e-9)
          c.require(false, "seed " + std::to_string(seed) + " " + to_string(ModelKind{o, f}) + ": " + fmt(s.objective) +
                               " vs brute force " + fmt(bf));
      }
    }
  }
  c.detail = (c.ok ? "" : c.detail + "; ") + std::to_string(compared) + " solves, max |diff| " + fmt(worst);
  report(4, "oracle equivalence", c, since(t0), 300);
}

// ---------------------------------------------------------------------------

std::vector<instances::SweepSetting> parse_settings(const std::string& text) {
  if (text == "all") return instances::SweepConfig{}.settings();
  std::vector<instances::SweepSetting> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ';')) {
    instances::SweepSetting s;
    if (std::sscanf(item.c_str(), "%d,%d,%d", &s.scenarios, &s.groups, &s.terminals_per_group) != 3)
      throw ValidationError("bad setting '" + item + "'", "SSFP_ACCEPT_SETTINGS");
    out.push_back(s);
  }
  return out;
}

const char* env_or(const char* name, const char* fallback) {
  const char* v = std::getenv(name);
  return v && *v ? v : fallback;
}

void criteria5and6() {
  const auto t0 = Clock::now();
  ex::SweepOptions opt;
  const int seeds = std::atoi(env_or("SSFP_ACCEPT_SEEDS", "2"));
  opt.config = instances::SweepConfig::with_seed_count(seeds);
  opt.settings = parse_settings(env_or("SSFP_ACCEPT_SETTINGS", kDefaultSettings));
  opt.bnb.node_limit = std::atoll(env_or("SSFP_ACCEPT_NODE_LIMIT", "20000"));
  opt.bnb.branching = solver::Branching::kReliability;
  std::printf("sweep: %zu settings x %d seeds, node limit %lld, %d threads\n", opt.settings.size(), seeds,
              opt.bnb.node_limit, ex::default_threads());
  std::fflush(stdout);
  const ex::SweepResult res = ex::run_sweep(opt);
  const double seconds = since(t0);

  Check c5;
  int ok_records = 0;
  for (const auto& r : res.records) {
    if (!r.ok) {
      std::printf("       record S%d K%d T%d seed %llu failed: %s\n", r.setting.scenarios, r.setting.groups,
                  r.setting.terminals_per_group, static_cast<unsigned long long>(r.seed), r.diagnostic.c_str());
      continue;
    }
    ++ok_records;
    const std::string tag = "S" + std::to_string(r.setting.scenarios) + "K" + std::to_string(r.setting.groups) + "T" +
                            std::to_string(r.setting.terminals_per_group) + "/" + std::to_string(r.seed);
    for (int m = 0; m < 3; ++m) {
      c5.require(std::abs(r.matrix[m][m] - 1) <= 1e-9, tag + " diagonal " + fmt(r.matrix[m][m]));
      for (int col = 0; col < 3; ++col) c5.require(r.matrix[m][col] >= 1 - 1e-7, tag + " entry below 1");
    }
    // VSS >= 0: SO optimum is at most the DO first stage priced under SO.
    c5.require(r.raw[0][2] - r.reports[5].objective >= -1e-7, tag + " negative VSS");
    // RO optimum is at most every other first stage's worst case.
    c5.require(r.reports[3].objective <= std::min(r.raw[0][1], r.raw[2][1]) + 1e-7, tag + " RO not minimal");
  }
  c5.require(ok_records > 0, "no successful records");
  const double reference[3][3] = {{1, 1.286, 1.057}, {1.623, 1, 1.048}, {1.225, 1.116, 1}};
  bool soft = true;
  std::string matrix;
  for (int m = 0; m < 3; ++m) {
    matrix += m ? " / " : "";
    for (int col = 0; col < 3; ++col) {
      matrix += (col ? " " : "") + fmt(std::round(res.mean_of_ratios[m][col] * 1000) / 1000);
      if (std::abs(res.mean_of_ratios[m][col] - reference[m][col]) > 0.15) soft = false;
    }
  }
  c5.detail = (c5.ok ? "" : c5.detail + "; ") + std::to_string(ok_records) + " records, mean-of-ratios matrix [" +
              matrix + "]";
  report(5, "cross-objective matrix (hard checks)", c5, seconds, 1800);
  // Aborted records carry their diagnostic and stay out of the aggregates.
  std::printf("       %d of %zu records failed\n", res.failed, res.records.size());
  std::printf("[%s] criterion 5 (soft): off-diagonal entries within 0.15 of the reference table\n",
              soft ? "PASS" : "SOFT-FAIL");

  Check c6;
  std::vector<double> ratios;
  for (const auto& r : res.records) {
    if (!r.ok) continue;
    ratios.push_back(r.ro_do_ratio);
    c6.require(r.ro_do_ratio >= 1 - 1e-9, "ratio " + fmt(r.ro_do_ratio) + " below 1");
  }
  double mean = 0, median = 0;
  if (!ratios.empty()) {
    std::sort(ratios.begin(), ratios.end());
    for (double r : ratios) mean += r;
    mean /= static_cast<double>(ratios.size());
    const size_t n = ratios.size();
    median = n % 2 ? ratios[n / 2] : 0.5 * (ratios[n / 2 - 1] + ratios[n / 2]);
  }
  c6.require(!ratios.empty(), "no ratios");
  c6.require(mean > median, "mean " + fmt(mean) + " not above median " + fmt(median));
  c6.detail = (c6.ok ? "" : c6.detail + "; ") + std::to_string(ratios.size()) + " ratios, min " +
              fmt(ratios.empty() ? 0 : ratios.front()) + ", median " + fmt(median) + ", mean " + fmt(mean) + ", max " +
              fmt(ratios.empty() ? 0 : ratios.back());
  report(6, "RO/DO first-stage ratio", c6, 0, 1);
}

// ---------------------------------------------------------------------------

// Independent BFS connectivity check over usable pairs.
bool groups_connected(const Instance& inst, const EdgePipeSet& pairs) {
  const Graph& g = inst.graph();
  std::vector<std::vector<Vertex>> adj(static_cast<size_t>(g.num_vertices()) + 1);
  for (const EdgePipe& p : pairs) {
    if (!inst.is_feasible_pipe(p.pipe) || !inst.is_admissible(p.edge)) continue;
    const Edge& e = g.edge(p.edge);
    adj[static_cast<size_t>(e.u)].push_back(e.v);
    adj[static_cast<size_t>(e.v)].push_back(e.u);
  }
  for (const auto& group : inst.terminals().groups()) {
    std::vector<char> seen(adj.size(), 0);
    std::queue<Vertex> q;
    q.push(group.front());
    seen[static_cast<size_t>(group.front())] = 1;
    while (!q.empty()) {
      const Vertex v = q.front();
      q.pop();
      for (Vertex w : adj[static_cast<size_t>(v)])
        if (!seen[static_cast<size_t>(w)]) seen[static_cast<size_t>(w)] = 1, q.push(w);
    }
    for (Vertex t : group)
      if (!seen[static_cast<size_t>(t)]) return false;
  }
  return true;
}

void criterion7() {
  const auto t0 = Clock::now();
  Check c;
  int removals = 0, solutions = 0;
  std::vector<TwoStageInstance> corpus = {instances::fig2_instance(0.45)};
  for (std::uint64_t seed = 1; seed <= 5; ++seed) corpus.push_back(testing::small_grid(seed, 2));
  for (size_t i = 0; i < corpus.size(); ++i) {
    const auto& ts = corpus[i];
    for (Optimization o : kOpts) {
      for (Flow f : kFlows) {
        const ModelKind kind{o, f};
        const std::string tag = (i == 0 ? std::string("fig2 ") : "grid " + std::to_string(i) + " ") + to_string(kind);
        const auto bm = models::build(ts, kind);
        // Closed-form sizes, checked exactly on the worked example and everywhere else too.
        c.require(bm.stats == models::predicted_size(ts, kind) && bm.stats.variables == bm.milp.num_variables() &&
                      bm.stats.constraints == bm.milp.num_constraints(),
                  tag + " size mismatch");
        const milp::Model back = milp::parse_lp(milp::export_lp(bm.milp));
        c.require(back.structurally_equal(bm.milp), tag + " LP round trip differs");

        const auto s = solve(bm);
        c.require(s.status == milp::SolveStatus::kOptimal, tag + " not optimal");
        if (s.status != milp::SolveStatus::kOptimal) continue;
        for (int j = 0; j < bm.milp.num_variables(); ++j) {
          const auto& v = bm.milp.variable(milp::VarId{j});
          if (v.kind != milp::VarKind::kBinary && !v.implied_integer) continue;
          const double x = s.values[static_cast<size_t>(j)];
          if (std::min(std::abs(x), std::abs(x - 1)) > 1e-6) c.require(false, tag + " " + v.name + " = " + fmt(x));
        }
        const auto sol = models::extract(bm, s.values, ts.existing);
        std::vector<std::pair<const Instance*, EdgePipeSet>> stages = {{&ts.first_stage, sol.first_stage}};
        for (size_t sc = 0; sc < sol.recourse.size(); ++sc)
          stages.push_back({&ts.scenarios[sc], sol.first_stage.united(sol.recourse[sc])});
        for (const auto& [inst, used] : stages) {
          ++solutions;
          c.require(static_cast<bool>(validate_feasible(*inst, used)), tag + " extracted solution rejected");
          for (const EdgePipe& p : used) {
            EdgePipeSet fewer = used;
            fewer.erase(p);
            if (groups_connected(*inst, fewer)) continue;
            ++removals;
            c.require(!validate_feasible(*inst, fewer), tag + " accepted a disconnected solution");
          }
        }
      }
    }
  }
  const auto fig2 = instances::fig2_instance();
  const long long want_u = 294;
  c.require(models::build(fig2, {Optimization::kDO, Flow::kUndirected}).stats.variables == want_u,
            "fig2 DO-U variable count");
  c.detail = (c.ok ? "" : c.detail + "; ") + "6 builds x " + std::to_string(corpus.size()) + " instances, " +
             std::to_string(solutions) + " stage solutions, " + std::to_string(removals) + " disconnecting removals";
  report(7, "structural checks", c, since(t0), 120);
}

}  // namespace

int main() {
  using Fn = void (*)();
  const std::vector<std::pair<int, Fn>> steps = {{1, criterion1}, {2, criterion2}, {3, criterion3},
                                                 {4, criterion4}, {7, criterion7}, {5, criteria5and6}};
  const char* only = std::getenv("SSFP_ACCEPT_ONLY");
  for (auto [id, fn] : steps) {
    if (only && std::string(only).find(std::to_string(id)) == std::string::npos) continue;
    try {
      fn();
    } catch (const std::exception& e) {
      ++hard_failures;
      std::printf("[FAIL] criterion %d: exception: %s\n", id, e.what());
    }
  }
  std::printf("%s: %d hard failure(s)\n", hard_failures ? "FAILED" : "OK", hard_failures);
  return hard_failures ? 1 : 0;
}
