#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ssfp/instance.hpp"
#include "ssfp/instances/instances.hpp"
#include "ssfp/kinds.hpp"
#include "ssfp/milp/model.hpp"
#include "ssfp/models/models.hpp"
#include "ssfp/solver/branch_and_bound.hpp"

namespace ssfp::experiments {

/// Outcome of building and solving one of the six models.
struct SolveReport {
  ModelKind kind;
  milp::SolveStatus status = milp::SolveStatus::kNumericalFailure;
  double objective = milp::kInfinity;
  /// Best proven lower bound and the root LP relaxation value.
  double bound = -milp::kInfinity;
  double lp_bound = -milp::kInfinity;
  long long nodes = 0;
  long long lp_iterations = 0;
  /// Pairs bought in stage one (pre-existing pairs excluded) and, per scenario,
  /// the pairs bought on top of stage one.
  EdgePipeSet first_stage;
  std::vector<EdgePipeSet> recourse;
  models::SizeStats size;
  double build_seconds = 0.0;
  double solve_seconds = 0.0;
};

/// DO models use the first stage with the instance's pre-existing pairs.
SolveReport solve_model(const TwoStageInstance& instance, ModelKind kind, const solver::BnbConfig& config = {});

/// Thrown by the evaluation routines when a solve does not reach optimality.
class SolveFailure : public std::runtime_error {
 public:
  SolveFailure(const std::string& what, milp::SolveStatus status) : std::runtime_error(what), status_(status) {}
  milp::SolveStatus status() const noexcept { return status_; }

 private:
  milp::SolveStatus status_;
};

/// A fixed first-stage decision priced in every scenario.
struct Evaluation {
  double first_stage_cost = 0.0;
  /// Cheapest completion of each scenario on top of stage one and S0.
  std::vector<double> recourse;

  double worst_case() const;
  double expected(const std::vector<double>& probabilities) const;
};

/// Throws ValidationError if `first_stage` does not connect the first-stage
/// groups, SolveFailure if a recourse problem cannot be solved to optimality.
Evaluation evaluate(const TwoStageInstance& instance, const EdgePipeSet& first_stage,
                    const solver::BnbConfig& config = {});

/// DO: first-stage cost. RO: plus the worst recourse. SO: plus the expected
/// recourse under `probabilities` (the instance's own when omitted).
double evaluate_under(Optimization objective, const TwoStageInstance& instance, const EdgePipeSet& first_stage,
                      const std::optional<std::vector<double>>& probabilities = std::nullopt);

struct VssReport {
  double eevs = 0.0;
  double so_optimum = 0.0;
  double vss() const { return eevs - so_optimum; }
};

/// Value of the stochastic solution: the DO-optimal first stage evaluated
/// under the SO objective, minus the SO optimum. Uses the directed models.
VssReport vss_report(const TwoStageInstance& instance, const std::optional<std::vector<double>>& probabilities = std::nullopt);
double vss(const TwoStageInstance& instance, const std::optional<std::vector<double>>& probabilities = std::nullopt);

/// Expected cost of one first stage as a line in rho2: intercept + slope * rho2.
struct CostLine {
  EdgePipeSet first_stage;
  double intercept = 0.0;
  double slope = 0.0;
  double at(double rho2) const { return intercept + slope * rho2; }
};

struct CurveRow {
  double rho2 = 0.0;
  /// One value per envelope line, in the order of CurveTable::lines.
  std::vector<double> route_costs;
  double do_cost = 0.0;
  double ro_cost = 0.0;
  double so_optimum = 0.0;
  double vss() const { return do_cost - so_optimum; }
};

struct CurveTable {
  /// Lines of the lower envelope, left to right.
  std::vector<CostLine> lines;
  /// rho2 where the minimizer switches from lines[i] to lines[i + 1].
  std::vector<double> intersections;
  CostLine do_line;
  CostLine ro_line;
  std::vector<CurveRow> rows;
};

/// Two-scenario instances only. The SO value is the lower envelope of the
/// lines of all first stages; it is traced exactly by solving SO at the
/// endpoints and at every intersection of the lines found so far.
CurveTable cost_curves(const TwoStageInstance& instance, const std::vector<double>& rho_grid);

/// Parses "lo:hi:step" into an inclusive grid; values are lo + i * step.
std::vector<double> parse_grid(const std::string& spec);

/// Rows are the evaluated model's solution (DO, RO, SO); columns the objective
/// (DO first stage, RO worst case, SO expected), each divided by the
/// column owner's optimum.
using Matrix3 = std::array<std::array<double, 3>, 3>;

struct SweepRecord {
  int setting_id = 0;
  instances::SweepSetting setting;
  std::uint64_t seed = 0;
  bool ok = false;
  std::string diagnostic;
  /// In the order DO-U, DO-D, RO-U, RO-D, SO-U, SO-D.
  std::vector<SolveReport> reports;
  /// Evaluations of the DO, RO and SO first stages (directed solutions).
  std::array<Evaluation, 3> evaluations;
  /// Raw objective values: row = solution, column = objective.
  Matrix3 raw{};
  Matrix3 matrix{};
  /// First-stage cost of the RO solution over that of the DO solution.
  double ro_do_ratio = 0.0;
};

struct SweepOptions {
  instances::SweepConfig config;
  /// Replaces config.settings() when non-empty.
  std::vector<instances::SweepSetting> settings;
  /// 0: SSFP_THREADS, else hardware concurrency.
  int threads = 0;
  solver::BnbConfig bnb;
  /// Called after each record with the number finished so far; serialized.
  std::function<void(const SweepRecord&, size_t done, size_t total)> progress;
};

struct SweepResult {
  std::vector<SweepRecord> records;
  /// Entrywise mean of the per-record matrices over successful records.
  Matrix3 mean_of_ratios{};
  /// Mean raw objective divided by the mean optimum of the column.
  Matrix3 ratio_of_means{};
  int failed = 0;
};

/// The six model kinds in sweep order.
std::vector<ModelKind> all_kinds();

SweepRecord run_record(const instances::SweepSetting& setting, std::uint64_t seed, const instances::SweepConfig& config,
                       const solver::BnbConfig& bnb = {});
SweepResult run_sweep(const SweepOptions& options);
/// Thread count from SSFP_THREADS, else hardware concurrency (at least 1).
int default_threads();

/// CSV writers. Timing columns are written as 0 unless `timings` is set so
/// that reruns are byte-identical.
std::string sweep_csv(const SweepResult& result, bool timings = false);
std::string matrix_csv(const SweepResult& result);
std::string ratios_csv(const SweepResult& result);
std::string curves_csv(const CurveTable& table);

}  // namespace ssfp::experiments
