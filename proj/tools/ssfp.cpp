// ssfp: command-line front end for the two-stage Steiner forest models.
//
// Exit codes: 0 success, 1 internal/numerical failure, 2 usage or input
// error, 3 infeasible instance or solution, 4 node limit reached.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "ssfp/error.hpp"
#include "ssfp/experiments/experiments.hpp"
#include "ssfp/feasibility.hpp"
#include "ssfp/instances/instances.hpp"
#include "ssfp/milp/lp_format.hpp"
#include "ssfp/models/models.hpp"

namespace {

using json = nlohmann::ordered_json;
using namespace ssfp;

constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitNodeLimit = 4;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Carries an exit code chosen by a subcommand up to main.
struct ExitWith {
  int code;
  std::string message;
};

TwoStageInstance load_arg(const std::string& spec, std::optional<double> rho2) {
  TwoStageInstance inst;
  if (spec == "builtin:fig2") {
    return instances::fig2_instance(rho2.value_or(0.5));
  } else if (spec == "builtin:four-cycle") {
    // Single-stage instance wrapped as one scenario identical to stage one.
    const Instance base = instances::four_cycle_instance();
    inst.first_stage = base;
    inst.scenarios = {base.with_multiplier(2.0)};
    inst.probabilities = {1.0};
  } else if (spec.rfind("builtin:", 0) == 0) {
    throw UsageError("unknown builtin instance '" + spec + "' (have builtin:fig2, builtin:four-cycle)");
  } else {
    if (!std::filesystem::exists(spec)) throw UsageError("instance file not found: " + spec);
    inst = instances::load_instance(spec);
  }
  if (rho2) {
    if (inst.num_scenarios() != 2) throw UsageError("--rho2 needs a two-scenario instance");
    if (*rho2 < 0.0 || *rho2 > 1.0) throw UsageError("--rho2 must lie in [0, 1]");
    inst = inst.with_probabilities(two_scenario_probabilities(*rho2));
  }
  inst.validate();
  return inst;
}

ModelKind parse_kind(const std::string& model, const std::string& flow) {
  auto o = parse_optimization(model);
  auto f = parse_flow(flow);
  if (!o) throw UsageError("--model must be do, ro or so");
  if (!f) throw UsageError("--flow must be u or d");
  return {*o, *f};
}

solver::BnbConfig bnb_config(long long node_limit, const std::string& branching) {
  solver::BnbConfig c;
  if (node_limit < 1) throw UsageError("--node-limit must be positive");
  c.node_limit = node_limit;
  if (branching == "most-fractional")
    c.branching = solver::Branching::kMostFractional;
  else if (branching == "reliability")
    c.branching = solver::Branching::kReliability;
  else
    throw UsageError("--branching must be most-fractional or reliability");
  return c;
}

json pairs_json(const Instance& inst, const EdgePipeSet& pairs) {
  json arr = json::array();
  for (const EdgePipe& p : pairs) {
    const Edge& e = inst.graph().edge(p.edge);
    arr.push_back({{"pipe", p.pipe}, {"edge", p.edge}, {"u", inst.graph().label(e.u)}, {"v", inst.graph().label(e.v)}});
  }
  return arr;
}

std::string pairs_text(const Instance& inst, const EdgePipeSet& pairs) {
  if (pairs.empty()) return "(none)";
  std::string out;
  for (const EdgePipe& p : pairs) {
    const Edge& e = inst.graph().edge(p.edge);
    if (!out.empty()) out += ' ';
    out += std::to_string(p.pipe) + "@" + std::to_string(inst.graph().label(e.u)) + "-" +
           std::to_string(inst.graph().label(e.v));
  }
  return out;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw UsageError("cannot write " + path);
  out << text;
}

int status_exit(milp::SolveStatus s) {
  switch (s) {
    case milp::SolveStatus::kOptimal: return 0;
    case milp::SolveStatus::kInfeasible: return kExitInfeasible;
    case milp::SolveStatus::kNodeLimit: return kExitNodeLimit;
    default: return kExitFailure;
  }
}

// ---- solve ----

struct SolveArgs {
  std::string instance, model, flow = "d", out, branching = "most-fractional";
  std::optional<double> rho2, cutoff;
  long long node_limit = 10'000'000;
  bool timings = false;
};

int cmd_solve(const SolveArgs& a) {
  const TwoStageInstance inst = load_arg(a.instance, a.rho2);
  const ModelKind kind = parse_kind(a.model, a.flow);
  solver::BnbConfig cfg = bnb_config(a.node_limit, a.branching);
  if (a.cutoff) cfg.cutoff = *a.cutoff;
  const experiments::SolveReport r = experiments::solve_model(inst, kind, cfg);

  const bool has = r.status == milp::SolveStatus::kOptimal || !r.first_stage.empty() || !r.recourse.empty();
  std::cout << "model: " << to_string(kind) << "\n"
            << "status: " << milp::to_string(r.status) << "\n"
            << "objective: " << (has ? fmt(r.objective) : "none") << "\n"
            << "bound: " << fmt(r.bound) << "\n"
            << "lp_bound: " << fmt(r.lp_bound) << "\n"
            << "nodes: " << r.nodes << "\n"
            << "size: " << r.size.variables << " variables, " << r.size.constraints << " constraints\n"
            << "first_stage: " << pairs_text(inst.first_stage, r.first_stage) << "\n";
  for (size_t s = 0; s < r.recourse.size(); ++s)
    std::cout << "scenario " << s + 1 << ": " << pairs_text(inst.scenarios[s], r.recourse[s]) << "\n";

  if (!a.out.empty()) {
    json j;
    j["model"] = to_string(kind);
    j["status"] = milp::to_string(r.status);
    j["objective"] = has ? json(r.objective) : json(nullptr);
    j["bound"] = r.bound;
    j["lp_bound"] = r.lp_bound;
    j["nodes"] = r.nodes;
    j["lp_iterations"] = r.lp_iterations;
    j["variables"] = r.size.variables;
    j["constraints"] = r.size.constraints;
    j["probabilities"] = inst.probabilities;
    j["first_stage"] = pairs_json(inst.first_stage, r.first_stage);
    json scen = json::array();
    for (size_t s = 0; s < r.recourse.size(); ++s)
      scen.push_back({{"scenario", s + 1}, {"pairs", pairs_json(inst.scenarios[s], r.recourse[s])}});
    j["scenarios"] = scen;
    if (a.timings) j["timings"] = {{"build_s", r.build_seconds}, {"solve_s", r.solve_seconds}};
    write_text(a.out, j.dump(2) + "\n");
  }
  if (r.status == milp::SolveStatus::kOptimal) return 0;
  throw ExitWith{status_exit(r.status), to_string(kind) + " ended with status " + milp::to_string(r.status)};
}

// ---- validate ----

EdgePipe read_pair(const Instance& inst, const json& j, const std::string& where) {
  auto need_int = [&](const json& v, const std::string& field) {
    if (!v.is_number_integer()) throw ValidationError("expected an integer", where + field);
    return v.get<int>();
  };
  EdgePipe p;
  if (j.is_array()) {
    if (j.size() != 2) throw ValidationError("expected [pipe, edge]", where);
    p.pipe = need_int(j[0], "[0]");
    p.edge = need_int(j[1], "[1]");
  } else if (j.is_object()) {
    if (!j.contains("pipe")) throw ValidationError("missing field", where + ".pipe");
    p.pipe = need_int(j["pipe"], ".pipe");
    if (j.contains("edge")) {
      p.edge = need_int(j["edge"], ".edge");
    } else if (j.contains("u") && j.contains("v")) {
      const auto u = inst.graph().vertex_with_label(need_int(j["u"], ".u"));
      const auto v = inst.graph().vertex_with_label(need_int(j["v"], ".v"));
      if (!u || !v) throw ValidationError("unknown vertex", where);
      const auto e = inst.graph().find_edge(*u, *v);
      if (!e) throw ValidationError("no such edge", where);
      p.edge = *e;
    } else {
      throw ValidationError("need edge or u and v", where);
    }
  } else {
    throw ValidationError("expected [pipe, edge] or an object", where);
  }
  return p;
}

EdgePipeSet read_pairs(const Instance& inst, const json& arr, const std::string& where) {
  if (!arr.is_array()) throw ValidationError("expected an array", where);
  EdgePipeSet out;
  for (size_t i = 0; i < arr.size(); ++i) out.insert(read_pair(inst, arr[i], where + "[" + std::to_string(i) + "]"));
  check_pair_ids(inst, out, where);
  return out;
}

int cmd_validate(const std::string& instance, const std::string& solution_path, std::optional<double> rho2) {
  const TwoStageInstance inst = load_arg(instance, rho2);
  std::ifstream in(solution_path);
  if (!in) throw UsageError("cannot read " + solution_path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw UsageError(solution_path + ": " + e.what());
  }
  if (!j.is_object() || !j.contains("first_stage")) throw ValidationError("missing field", "first_stage");
  const EdgePipeSet fs = read_pairs(inst.first_stage, j["first_stage"], "first_stage");
  const EdgePipeSet base = fs.united(inst.existing);

  if (const auto r = validate_feasible(inst.first_stage, base); !r)
    throw ExitWith{kExitInfeasible, "first stage infeasible: " + r.diagnostic};
  if (j.contains("scenarios")) {
    const json& scen = j["scenarios"];
    if (!scen.is_array() || static_cast<int>(scen.size()) != inst.num_scenarios())
      throw ValidationError("expected " + std::to_string(inst.num_scenarios()) + " entries", "scenarios");
    for (int s = 0; s < inst.num_scenarios(); ++s) {
      const std::string where = "scenarios[" + std::to_string(s) + "]";
      const json& entry = scen[static_cast<size_t>(s)];
      const json& pairs = entry.is_object() && entry.contains("pairs") ? entry["pairs"] : entry;
      const EdgePipeSet add = read_pairs(inst.scenarios[static_cast<size_t>(s)], pairs, where);
      if (const auto r = validate_feasible(inst.scenarios[static_cast<size_t>(s)], base.united(add)); !r)
        throw ExitWith{kExitInfeasible, "scenario " + std::to_string(s + 1) + " infeasible: " + r.diagnostic};
    }
  }
  std::cout << "feasible\n";
  return 0;
}

// ---- export-lp ----

int cmd_export(const std::string& instance, const std::string& model, const std::string& flow,
               std::optional<double> rho2, const std::string& out) {
  const TwoStageInstance inst = load_arg(instance, rho2);
  const models::BuiltModel bm = models::build(inst, parse_kind(model, flow));
  const std::string text = milp::export_lp(bm.milp);
  if (out.empty())
    std::cout << text;
  else
    write_text(out, text);
  return 0;
}

// ---- gen ----

instances::SweepSetting parse_setting(const std::string& text) {
  instances::SweepSetting s;
  char c1 = 0, c2 = 0;
  std::istringstream in(text);
  if (!(in >> s.scenarios >> c1 >> s.groups >> c2 >> s.terminals_per_group) || c1 != ',' || c2 != ',' ||
      !in.eof())
    throw UsageError("expected S,K,T, got '" + text + "'");
  if (s.scenarios < 1 || s.groups < 1 || s.terminals_per_group < 2)
    throw UsageError("need S >= 1, K >= 1, T >= 2");
  return s;
}

int cmd_gen(const std::string& config, unsigned long long seed, int rows, int cols, const std::string& out) {
  const instances::SweepSetting s = parse_setting(config);
  if (rows < 1 || cols < 1) throw UsageError("grid dimensions must be positive");
  const TwoStageInstance inst = instances::random_artificial(s, seed, rows, cols);
  const std::string text = instances::instance_to_json(inst);
  if (out.empty())
    std::cout << text;
  else
    write_text(out, text);
  return 0;
}

// ---- sweep ----

struct SweepArgs {
  std::string settings = "all", out_dir, branching = "reliability";
  int seeds = 10;
  int threads = 0;
  long long node_limit = 20000;
  bool timings = false;
  bool quiet = false;
};

int cmd_sweep(const SweepArgs& a) {
  if (a.seeds < 1) throw UsageError("--seeds must be positive");
  experiments::SweepOptions opt;
  opt.config = instances::SweepConfig::with_seed_count(a.seeds);
  if (a.settings != "all") {
    std::istringstream in(a.settings);
    std::string item;
    while (std::getline(in, item, ';')) {
      const instances::SweepSetting s = parse_setting(item);
      if (s.scenarios > 4 || s.groups > 3 || s.terminals_per_group > 5 || s.scenarios < 2 || s.terminals_per_group < 3)
        throw UsageError("setting " + item + " is outside S 2..4, K 1..3, T 3..5");
      opt.settings.push_back(s);
    }
    if (opt.settings.empty()) throw UsageError("--settings is empty");
  }
  opt.threads = a.threads;
  opt.bnb = bnb_config(a.node_limit, a.branching);
  if (!a.quiet) {
    opt.progress = [](const experiments::SweepRecord& r, size_t done, size_t total) {
      std::cerr << "[" << done << "/" << total << "] S" << r.setting.scenarios << " K" << r.setting.groups << " T"
                << r.setting.terminals_per_group << " seed " << r.seed << (r.ok ? " ok" : " FAILED: " + r.diagnostic)
                << "\n";
    };
  }
  std::filesystem::create_directories(a.out_dir);
  const experiments::SweepResult res = experiments::run_sweep(opt);
  const std::filesystem::path dir(a.out_dir);
  write_text((dir / "sweep.csv").string(), experiments::sweep_csv(res, a.timings));
  write_text((dir / "matrix.csv").string(), experiments::matrix_csv(res));
  write_text((dir / "ratios.csv").string(), experiments::ratios_csv(res));

  // curves.csv belongs to the two-scenario worked example.
  const auto table = experiments::cost_curves(instances::fig2_instance(), experiments::parse_grid("0:1:0.01"));
  write_text((dir / "curves.csv").string(), experiments::curves_csv(table));

  std::cout << "records: " << res.records.size() << ", failed: " << res.failed << "\n";
  for (size_t m = 0; m < 3; ++m) {
    static const char* names[3] = {"DO", "RO", "SO"};
    std::cout << names[m];
    for (size_t c = 0; c < 3; ++c) std::cout << " " << fmt(res.mean_of_ratios[m][c]);
    std::cout << "\n";
  }
  if (res.failed > 0) {
    bool node_limit = false;
    for (const auto& r : res.records)
      if (!r.ok && r.diagnostic.find("node_limit") != std::string::npos) node_limit = true;
    throw ExitWith{node_limit ? kExitNodeLimit : kExitFailure,
                   std::to_string(res.failed) + " of " + std::to_string(res.records.size()) +
                       " records failed; see the diagnostic column of sweep.csv"};
  }
  return 0;
}

// ---- curves ----

int cmd_curves(const std::string& instance, const std::string& grid, const std::string& out) {
  const TwoStageInstance inst = load_arg(instance, std::nullopt);
  if (inst.num_scenarios() != 2) throw UsageError("curves needs a two-scenario instance");
  const experiments::CurveTable t = experiments::cost_curves(inst, experiments::parse_grid(grid));
  const std::string text = experiments::curves_csv(t);
  if (out.empty()) {
    std::cout << text;
  } else {
    write_text(out, text);
    std::cout << "intersections:";
    for (double x : t.intersections) std::cout << " " << fmt(x);
    std::cout << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-stage stochastic Steiner forest models for pipe routing"};
  app.require_subcommand(1, 1);

  SolveArgs sa;
  auto* solve = app.add_subcommand("solve", "Build and solve one model");
  solve->add_option("--instance", sa.instance, "JSON file, builtin:fig2 or builtin:four-cycle")->required();
  solve->add_option("--model", sa.model, "do, ro or so")->required();
  solve->add_option("--flow", sa.flow, "u or d")->capture_default_str();
  solve->add_option("--rho2", sa.rho2, "Probability of scenario 2 (two-scenario instances)");
  solve->add_option("--out", sa.out, "Write a JSON report here");
  solve->add_option("--node-limit", sa.node_limit)->capture_default_str();
  solve->add_option("--branching", sa.branching, "most-fractional or reliability")->capture_default_str();
  solve->add_option("--cutoff", sa.cutoff, "Known attainable objective; prunes nodes bounded above it");
  solve->add_flag("--timings", sa.timings, "Include wall-clock times in the report");

  SweepArgs wa;
  auto* sweep = app.add_subcommand("sweep", "Random grid sweep; writes sweep, matrix, ratios and curves CSVs");
  sweep->add_option("--settings", wa.settings, "all, or S,K,T items separated by ';'")->capture_default_str();
  sweep->add_option("--seeds", wa.seeds, "Seeds 1..N per setting")->capture_default_str();
  sweep->add_option("--out-dir", wa.out_dir)->required();
  sweep->add_option("--threads", wa.threads, "0: SSFP_THREADS or hardware concurrency")->capture_default_str();
  sweep->add_option("--node-limit", wa.node_limit, "Per solve")->capture_default_str();
  sweep->add_option("--branching", wa.branching)->capture_default_str();
  sweep->add_flag("--timings", wa.timings, "Write wall-clock columns (otherwise 0)");
  sweep->add_flag("--quiet", wa.quiet, "No per-record progress on stderr");

  std::string ci = "builtin:fig2", cgrid = "0:1:0.01", cout_path;
  auto* curves = app.add_subcommand("curves", "Expected-cost lines over a rho2 grid");
  curves->add_option("--instance", ci)->capture_default_str();
  curves->add_option("--grid", cgrid, "lo:hi:step")->capture_default_str();
  curves->add_option("--out", cout_path);

  std::string vi, vs;
  std::optional<double> vrho;
  auto* validate = app.add_subcommand("validate", "Check a solution file for feasibility");
  validate->add_option("--instance", vi)->required();
  validate->add_option("--solution", vs)->required();
  validate->add_option("--rho2", vrho);

  std::string ei, em, ef = "d", eout;
  std::optional<double> erho;
  auto* exp = app.add_subcommand("export-lp", "Write a model in CPLEX LP format");
  exp->add_option("--instance", ei)->required();
  exp->add_option("--model", em)->required();
  exp->add_option("--flow", ef)->capture_default_str();
  exp->add_option("--rho2", erho);
  exp->add_option("--out", eout);

  std::string gconf, gout;
  unsigned long long gseed = 1;
  int grows = 5, gcols = 5;
  auto* gen = app.add_subcommand("gen", "Generate a random grid instance");
  gen->add_option("--config", gconf, "S,K,T: scenarios, groups, terminals per group")->required();
  gen->add_option("--seed", gseed)->capture_default_str();
  gen->add_option("--rows", grows)->capture_default_str();
  gen->add_option("--cols", gcols)->capture_default_str();
  gen->add_option("--out", gout);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*solve) return cmd_solve(sa);
    if (*sweep) return cmd_sweep(wa);
    if (*curves) return cmd_curves(ci, cgrid, cout_path);
    if (*validate) return cmd_validate(vi, vs, vrho);
    if (*exp) return cmd_export(ei, em, ef, erho, eout);
    if (*gen) return cmd_gen(gconf, gseed, grows, gcols, gout);
  } catch (const ExitWith& e) {
    std::cerr << "ssfp: " << e.message << "\n";
    return e.code;
  } catch (const UsageError& e) {
    std::cerr << "ssfp: " << e.what() << "\n";
    return kExitUsage;
  } catch (const InfeasibleInstanceError& e) {
    std::cerr << "ssfp: infeasible instance: " << e.what() << "\n";
    return kExitInfeasible;
  } catch (const ValidationError& e) {
    std::cerr << "ssfp: invalid input: " << e.what() << "\n";
    return kExitUsage;
  } catch (const experiments::SolveFailure& e) {
    std::cerr << "ssfp: " << e.what() << "\n";
    return status_exit(e.status()) == 0 ? kExitFailure : status_exit(e.status());
  } catch (const std::exception& e) {
    std::cerr << "ssfp: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitUsage;
}
