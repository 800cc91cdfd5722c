#pragma once

#include "ssfp/milp/model.hpp"

namespace ssfp::solver {

/// Solves the linear program given by `model`, which must contain continuous
/// variables only (relax() a mixed model first). Uses a bounded dual simplex
/// from the all-logical basis with a primal cleanup pass.
///
/// On optimality the solution carries primal values, row duals and reduced
/// costs. Numerical trouble is reported as kNumericalFailure, never as a
/// wrong optimum. Throws ValidationError if the model has binary variables.
milp::Solution solve_lp(const milp::Model& model);

}  // namespace ssfp::solver
