#include "ssfp/experiments/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <functional>
#include <mutex>
#include <sstream>
#include <thread>

#include "ssfp/error.hpp"
#include "ssfp/feasibility.hpp"

namespace ssfp::experiments {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

bool close(double a, double b, double rel) { return std::abs(a - b) <= rel * std::max(1.0, std::abs(b)); }

const char* const kSolutionNames[3] = {"DO", "RO", "SO"};

SolveReport require_optimal(const TwoStageInstance& inst, ModelKind kind, const solver::BnbConfig& config) {
  SolveReport r = solve_model(inst, kind, config);
  if (r.status != milp::SolveStatus::kOptimal)
    throw SolveFailure(to_string(kind) + " ended with status " + milp::to_string(r.status), r.status);
  return r;
}

CostLine line_for(const TwoStageInstance& inst, const EdgePipeSet& first_stage) {
  const Evaluation ev = evaluate(inst, first_stage);
  CostLine l;
  l.first_stage = first_stage;
  l.intercept = ev.first_stage_cost + ev.recourse[0];
  l.slope = ev.recourse[1] - ev.recourse[0];
  return l;
}

bool same_line(const CostLine& a, const CostLine& b) {
  return close(a.intercept, b.intercept, 1e-9) && close(a.slope, b.slope, 1e-9);
}

}  // namespace

SolveReport solve_model(const TwoStageInstance& instance, ModelKind kind, const solver::BnbConfig& config) {
  SolveReport r;
  r.kind = kind;
  const auto t0 = Clock::now();
  const models::BuiltModel bm = models::build(instance, kind);
  r.build_seconds = seconds_since(t0);
  r.size = bm.stats;
  const milp::Solution sol = solver::solve_milp(bm.milp, config);
  r.status = sol.status;
  r.objective = sol.objective;
  r.bound = sol.bound;
  r.lp_bound = sol.root_bound;
  r.nodes = sol.node_count;
  r.lp_iterations = sol.lp_iterations;
  r.solve_seconds = sol.solve_seconds;
  if (sol.has_solution()) {
    models::ExtractedSolution ex = models::extract(bm, sol.values, instance.existing);
    r.first_stage = std::move(ex.first_stage);
    r.recourse = std::move(ex.recourse);
  }
  return r;
}

double Evaluation::worst_case() const {
  double w = 0.0;
  for (double r : recourse) w = std::max(w, r);
  return first_stage_cost + w;
}

double Evaluation::expected(const std::vector<double>& probabilities) const {
  if (probabilities.size() != recourse.size())
    throw ValidationError("expected " + std::to_string(recourse.size()) + " probabilities", "probabilities");
  double e = first_stage_cost;
  for (size_t s = 0; s < recourse.size(); ++s) e += probabilities[s] * recourse[s];
  return e;
}

Evaluation evaluate(const TwoStageInstance& instance, const EdgePipeSet& first_stage, const solver::BnbConfig& config) {
  check_pair_ids(instance.first_stage, first_stage, "first_stage");
  const EdgePipeSet installed = first_stage.united(instance.existing);
  const FeasibilityReport fr = validate_feasible(instance.first_stage, installed);
  if (!fr) throw ValidationError("first-stage solution is infeasible: " + fr.diagnostic, "first_stage");

  Evaluation ev;
  ev.first_stage_cost = cost(instance.first_stage, instance.existing, first_stage);
  for (int s = 0; s < instance.num_scenarios(); ++s) {
    const Instance& scen = instance.scenarios[static_cast<size_t>(s)];
    if (validate_feasible(scen, installed)) {
      ev.recourse.push_back(0.0);
      continue;
    }
    const models::BuiltModel bm = models::build_do(scen, Flow::kDirected, installed);
    const milp::Solution sol = solver::solve_milp(bm.milp, config);
    if (sol.status != milp::SolveStatus::kOptimal)
      throw SolveFailure("recourse of scenario " + std::to_string(s + 1) + " ended with status " +
                             milp::to_string(sol.status),
                         sol.status);
    ev.recourse.push_back(sol.objective);
  }
  return ev;
}

double evaluate_under(Optimization objective, const TwoStageInstance& instance, const EdgePipeSet& first_stage,
                      const std::optional<std::vector<double>>& probabilities) {
  if (objective == Optimization::kDO) {
    check_pair_ids(instance.first_stage, first_stage, "first_stage");
    if (!validate_feasible(instance.first_stage, first_stage.united(instance.existing)))
      throw ValidationError("first-stage solution is infeasible", "first_stage");
    return cost(instance.first_stage, instance.existing, first_stage);
  }
  const Evaluation ev = evaluate(instance, first_stage);
  if (objective == Optimization::kRO) return ev.worst_case();
  return ev.expected(probabilities ? *probabilities : instance.probabilities);
}

VssReport vss_report(const TwoStageInstance& instance, const std::optional<std::vector<double>>& probabilities) {
  const TwoStageInstance inst = probabilities ? instance.with_probabilities(*probabilities) : instance;
  const SolveReport det = require_optimal(inst, {Optimization::kDO, Flow::kDirected}, {});
  const SolveReport sto = require_optimal(inst, {Optimization::kSO, Flow::kDirected}, {});
  VssReport v;
  v.eevs = evaluate(inst, det.first_stage).expected(inst.probabilities);
  v.so_optimum = sto.objective;
  return v;
}

double vss(const TwoStageInstance& instance, const std::optional<std::vector<double>>& probabilities) {
  return vss_report(instance, probabilities).vss();
}

CurveTable cost_curves(const TwoStageInstance& instance, const std::vector<double>& rho_grid) {
  if (instance.num_scenarios() != 2) throw ValidationError("cost curves need exactly two scenarios", "scenarios");
  auto so_line = [&](double rho2) {
    const SolveReport r =
        require_optimal(instance.with_probabilities(two_scenario_probabilities(rho2)), {Optimization::kSO, Flow::kDirected}, {});
    return line_for(instance, r.first_stage);
  };

  // Lines optimal at the two ends; every further envelope line is found by
  // solving at the intersection of its neighbours.
  std::vector<CostLine> env;
  std::function<void(const CostLine&, const CostLine&)> refine = [&](const CostLine& a, const CostLine& b) {
    if (same_line(a, b) || a.slope - b.slope <= 1e-12) return;
    const double rho = (b.intercept - a.intercept) / (a.slope - b.slope);
    if (!(rho > 0.0 && rho < 1.0)) return;
    const CostLine mid = so_line(rho);
    if (mid.at(rho) >= a.at(rho) - 1e-9 * std::max(1.0, std::abs(a.at(rho)))) return;
    refine(a, mid);
    env.push_back(mid);
    refine(mid, b);
  };
  const CostLine left = so_line(0.0);
  const CostLine right = so_line(1.0);
  env.push_back(left);
  refine(left, right);
  if (!same_line(left, right)) env.push_back(right);

  CurveTable t;
  t.lines = env;
  for (size_t i = 0; i + 1 < env.size(); ++i)
    t.intersections.push_back((env[i + 1].intercept - env[i].intercept) / (env[i].slope - env[i + 1].slope));
  t.do_line = line_for(instance, require_optimal(instance, {Optimization::kDO, Flow::kDirected}, {}).first_stage);
  t.ro_line = line_for(instance, require_optimal(instance, {Optimization::kRO, Flow::kDirected}, {}).first_stage);
  for (double rho : rho_grid) {
    if (rho < 0.0 || rho > 1.0) throw ValidationError("rho2 must lie in [0, 1]", "grid");
    CurveRow row;
    row.rho2 = rho;
    row.so_optimum = milp::kInfinity;
    for (const CostLine& l : t.lines) {
      row.route_costs.push_back(l.at(rho));
      row.so_optimum = std::min(row.so_optimum, l.at(rho));
    }
    row.do_cost = t.do_line.at(rho);
    row.ro_cost = t.ro_line.at(rho);
    t.rows.push_back(std::move(row));
  }
  return t;
}

std::vector<double> parse_grid(const std::string& spec) {
  double lo = 0;
  double hi = 0;
  double step = 0;
  char c1 = 0;
  char c2 = 0;
  std::istringstream in(spec);
  if (!(in >> lo >> c1 >> hi >> c2 >> step) || c1 != ':' || c2 != ':' || !(in >> std::ws).eof())
    throw ValidationError("expected lo:hi:step, got '" + spec + "'", "grid");
  if (step <= 0.0 || hi < lo) throw ValidationError("need step > 0 and hi >= lo", "grid");
  std::vector<double> out;
  const auto n = static_cast<long long>(std::floor((hi - lo) / step + 1e-9));
  for (long long i = 0; i <= n; ++i) out.push_back(std::min(hi, lo + static_cast<double>(i) * step));
  return out;
}

std::vector<ModelKind> all_kinds() {
  std::vector<ModelKind> out;
  for (Optimization o : {Optimization::kDO, Optimization::kRO, Optimization::kSO}) {
    for (Flow f : {Flow::kUndirected, Flow::kDirected}) out.push_back({o, f});
  }
  return out;
}

SweepRecord run_record(const instances::SweepSetting& setting, std::uint64_t seed, const instances::SweepConfig& config,
                       const solver::BnbConfig& bnb) {
  SweepRecord rec;
  rec.setting = setting;
  rec.setting_id = instances::setting_id(setting);
  rec.seed = seed;
  try {
    const TwoStageInstance inst = instances::random_artificial(setting, seed, config.rows, config.cols);
    for (ModelKind kind : all_kinds()) rec.reports.push_back(require_optimal(inst, kind, bnb));
    for (size_t i = 0; i < rec.reports.size(); i += 2) {
      const SolveReport& u = rec.reports[i];
      const SolveReport& d = rec.reports[i + 1];
      if (!close(u.objective, d.objective, 1e-7))
        throw SolveFailure(to_string(u.kind) + " and " + to_string(d.kind) + " disagree: " + num(u.objective) +
                               " vs " + num(d.objective),
                           milp::SolveStatus::kNumericalFailure);
    }
    const double opt[3] = {rec.reports[1].objective, rec.reports[3].objective, rec.reports[5].objective};
    for (int m = 0; m < 3; ++m) {
      const Evaluation ev = evaluate(inst, rec.reports[static_cast<size_t>(2 * m + 1)].first_stage, bnb);
      rec.evaluations[static_cast<size_t>(m)] = ev;
      auto& raw = rec.raw[static_cast<size_t>(m)];
      raw = {ev.first_stage_cost, ev.worst_case(), ev.expected(inst.probabilities)};
      for (int c = 0; c < 3; ++c)
        rec.matrix[static_cast<size_t>(m)][static_cast<size_t>(c)] = raw[static_cast<size_t>(c)] / opt[c];
    }
    rec.ro_do_ratio = rec.evaluations[1].first_stage_cost / rec.evaluations[0].first_stage_cost;
    rec.ok = true;
  } catch (const std::exception& e) {
    rec.ok = false;
    rec.diagnostic = e.what();
  }
  return rec;
}

int default_threads() {
  if (const char* env = std::getenv("SSFP_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  return std::max(1, static_cast<int>(std::thread::hardware_concurrency()));
}

SweepResult run_sweep(const SweepOptions& options) {
  struct Job {
    instances::SweepSetting setting;
    std::uint64_t seed;
  };
  std::vector<Job> jobs;
  const auto settings = options.settings.empty() ? options.config.settings() : options.settings;
  for (const auto& s : settings) {
    for (std::uint64_t seed : options.config.seeds) jobs.push_back({s, seed});
  }
  SweepResult res;
  res.records.resize(jobs.size());
  std::atomic<size_t> next{0};
  std::mutex progress_mutex;
  size_t done = 0;
  auto worker = [&] {
    for (size_t i = next++; i < jobs.size(); i = next++) {
      res.records[i] = run_record(jobs[i].setting, jobs[i].seed, options.config, options.bnb);
      if (options.progress) {
        std::lock_guard lock(progress_mutex);
        options.progress(res.records[i], ++done, jobs.size());
      }
    }
  };
  const int threads = std::min<int>(options.threads > 0 ? options.threads : default_threads(),
                                    static_cast<int>(std::max<size_t>(jobs.size(), 1)));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  Matrix3 sum_ratio{};
  Matrix3 sum_raw{};
  double sum_opt[3] = {0, 0, 0};
  int ok = 0;
  for (const SweepRecord& r : res.records) {
    if (!r.ok) {
      ++res.failed;
      continue;
    }
    ++ok;
    for (size_t m = 0; m < 3; ++m) {
      for (size_t c = 0; c < 3; ++c) {
        sum_ratio[m][c] += r.matrix[m][c];
        sum_raw[m][c] += r.raw[m][c];
      }
    }
    for (size_t c = 0; c < 3; ++c) sum_opt[c] += r.reports[2 * c + 1].objective;
  }
  if (ok > 0) {
    for (size_t m = 0; m < 3; ++m) {
      for (size_t c = 0; c < 3; ++c) {
        res.mean_of_ratios[m][c] = sum_ratio[m][c] / ok;
        res.ratio_of_means[m][c] = sum_raw[m][c] / sum_opt[c];
      }
    }
  }
  return res;
}

std::string sweep_csv(const SweepResult& result, bool timings) {
  std::ostringstream out;
  const auto kinds = all_kinds();
  out << "setting_id,scenarios,groups,terminals_per_group,seed,status";
  for (ModelKind k : kinds) {
    std::string n = to_string(k);
    std::replace(n.begin(), n.end(), '-', '_');
    out << ",obj_" << n << ",lp_" << n << ",nodes_" << n << ",vars_" << n << ",cons_" << n << ",build_s_" << n
        << ",solve_s_" << n;
  }
  for (const char* s : kSolutionNames) out << ",first_" << s << ",worst_" << s << ",expected_" << s;
  for (const char* s : kSolutionNames) {
    for (const char* c : kSolutionNames) out << ",m_" << s << "_" << c;
  }
  out << ",ro_do_ratio,vss,diagnostic\n";
  for (const SweepRecord& r : result.records) {
    out << r.setting_id << ',' << r.setting.scenarios << ',' << r.setting.groups << ',' << r.setting.terminals_per_group
        << ',' << r.seed << ',' << (r.ok ? "ok" : "failed");
    for (size_t i = 0; i < kinds.size(); ++i) {
      if (r.ok) {
        const SolveReport& s = r.reports[i];
        out << ',' << num(s.objective) << ',' << num(s.lp_bound) << ',' << s.nodes << ',' << s.size.variables << ','
            << s.size.constraints << ',' << num(timings ? s.build_seconds : 0.0) << ','
            << num(timings ? s.solve_seconds : 0.0);
      } else {
        out << ",,,,,,,";
      }
    }
    for (size_t m = 0; m < 3; ++m) {
      for (size_t c = 0; c < 3; ++c) out << ',' << (r.ok ? num(r.raw[m][c]) : "");
    }
    for (size_t m = 0; m < 3; ++m) {
      for (size_t c = 0; c < 3; ++c) out << ',' << (r.ok ? num(r.matrix[m][c]) : "");
    }
    out << ',' << (r.ok ? num(r.ro_do_ratio) : "") << ',' << (r.ok ? num(r.raw[0][2] - r.reports[5].objective) : "");
    std::string diag = r.diagnostic;
    std::replace(diag.begin(), diag.end(), ',', ';');
    std::replace(diag.begin(), diag.end(), '\n', ' ');
    out << ',' << diag << '\n';
  }
  return out.str();
}

std::string matrix_csv(const SweepResult& result) {
  std::ostringstream out;
  out << "aggregation,solution,objective_DO,objective_RO,objective_SO\n";
  const std::pair<const char*, const Matrix3*> blocks[2] = {{"mean_of_ratios", &result.mean_of_ratios},
                                                            {"ratio_of_means", &result.ratio_of_means}};
  for (const auto& [name, mat] : blocks) {
    for (size_t m = 0; m < 3; ++m) {
      out << name << ',' << kSolutionNames[m];
      for (size_t c = 0; c < 3; ++c) out << ',' << num((*mat)[m][c]);
      out << '\n';
    }
  }
  return out.str();
}

std::string ratios_csv(const SweepResult& result) {
  std::ostringstream out;
  out << "setting_id,seed,ro_do_ratio\n";
  for (const SweepRecord& r : result.records) {
    if (r.ok) out << r.setting_id << ',' << r.seed << ',' << num(r.ro_do_ratio) << '\n';
  }
  return out.str();
}

std::string curves_csv(const CurveTable& table) {
  std::ostringstream out;
  out << "rho2";
  for (size_t i = 0; i < table.lines.size(); ++i) out << ",route_" << i + 1;
  out << ",do,ro,so_optimum,vss\n";
  for (const CurveRow& row : table.rows) {
    out << num(row.rho2);
    for (double v : row.route_costs) out << ',' << num(v);
    out << ',' << num(row.do_cost) << ',' << num(row.ro_cost) << ',' << num(row.so_optimum) << ',' << num(row.vss())
        << '\n';
  }
  return out.str();
}

}  // namespace ssfp::experiments
