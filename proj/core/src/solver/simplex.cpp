#include "ssfp/solver/simplex.hpp"

#include <chrono>

#include "lp_engine.hpp"
#include "ssfp/error.hpp"

namespace ssfp::solver {

namespace {

milp::SolveStatus to_status(detail::LpResult r) {
  switch (r) {
    case detail::LpResult::kOptimal: return milp::SolveStatus::kOptimal;
    case detail::LpResult::kInfeasible: return milp::SolveStatus::kInfeasible;
    case detail::LpResult::kUnbounded: return milp::SolveStatus::kUnbounded;
    case detail::LpResult::kIterationLimit:
    case detail::LpResult::kNumericalFailure: return milp::SolveStatus::kNumericalFailure;
  }
  return milp::SolveStatus::kNumericalFailure;
}

}  // namespace

milp::Solution solve_lp(const milp::Model& model) {
  for (const milp::Variable& v : model.variables()) {
    if (v.kind == milp::VarKind::kBinary) throw ValidationError("solve_lp needs a continuous model; relax it first", v.name);
  }
  const auto start = std::chrono::steady_clock::now();
  detail::LpEngine engine(model);
  const detail::LpResult result = engine.solve();

  milp::Solution sol;
  sol.status = to_status(result);
  sol.lp_iterations = engine.iterations();
  if (result == detail::LpResult::kOptimal) {
    sol.values = engine.values();
    sol.objective = engine.objective();
    sol.bound = sol.objective;
    sol.root_bound = sol.objective;
    sol.row_duals = engine.row_duals();
    sol.reduced_costs = engine.reduced_costs();
  } else if (result == detail::LpResult::kUnbounded) {
    sol.objective = -milp::kInfinity;
    sol.bound = -milp::kInfinity;
  } else if (result == detail::LpResult::kInfeasible) {
    sol.bound = milp::kInfinity;
  }
  sol.solve_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return sol;
}

}  // namespace ssfp::solver
