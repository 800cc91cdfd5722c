#include "ssfp/milp/model.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "ssfp/error.hpp"

namespace ssfp::milp {

VarId Model::add_variable(std::string name, VarKind kind, double lower, double upper, double objective) {
  if (name.empty()) throw ValidationError("variable name must not be empty");
  if (var_index_.count(name)) throw ValidationError("duplicate variable name", name);
  if (std::isnan(lower) || std::isnan(upper) || lower > upper)
    throw ValidationError("invalid bounds", name);
  if (kind == VarKind::kBinary && (lower != 0.0 || upper != 1.0))
    throw ValidationError("binary variables must have bounds [0, 1]", name);
  if (!std::isfinite(objective)) throw ValidationError("objective coefficient must be finite", name);
  const int index = num_variables();
  var_index_.emplace(name, index);
  variables_.push_back(Variable{std::move(name), kind, lower, upper, objective, false});
  return VarId{index};
}

void Model::check_var(VarId v, const char* where) const {
  if (v.index < 0 || v.index >= num_variables())
    throw ValidationError("unknown variable handle " + std::to_string(v.index), where);
}

ConId Model::add_constraint(std::string name, std::vector<Term> terms, Sense sense, double rhs) {
  if (name.empty()) throw ValidationError("constraint name must not be empty");
  if (con_index_.count(name)) throw ValidationError("duplicate constraint name", name);
  if (!std::isfinite(rhs)) throw ValidationError("right-hand side must be finite", name);
  std::vector<Term> merged;
  merged.reserve(terms.size());
  std::map<int, size_t> slot;
  for (const Term& t : terms) {
    check_var(t.var, name.c_str());
    if (!std::isfinite(t.coef)) throw ValidationError("coefficient must be finite", name);
    auto [it, inserted] = slot.emplace(t.var.index, merged.size());
    if (inserted) {
      merged.push_back(t);
    } else {
      merged[it->second].coef += t.coef;
    }
  }
  const int index = num_constraints();
  con_index_.emplace(name, index);
  constraints_.push_back(Constraint{std::move(name), std::move(merged), sense, rhs});
  return ConId{index};
}

void Model::set_objective(VarId var, double coef) {
  check_var(var, "set_objective");
  if (!std::isfinite(coef)) throw ValidationError("objective coefficient must be finite");
  variables_[static_cast<size_t>(var.index)].objective = coef;
}

void Model::set_objective(std::span<const Term> terms) {
  for (auto& v : variables_) v.objective = 0.0;
  for (const Term& t : terms) {
    check_var(t.var, "set_objective");
    variables_[static_cast<size_t>(t.var.index)].objective += t.coef;
  }
}

void Model::set_bounds(VarId var, double lower, double upper) {
  check_var(var, "set_bounds");
  Variable& v = variables_[static_cast<size_t>(var.index)];
  if (std::isnan(lower) || std::isnan(upper) || lower > upper) throw ValidationError("invalid bounds", v.name);
  if (v.kind == VarKind::kBinary && (lower != 0.0 || upper != 1.0))
    throw ValidationError("binary variables must have bounds [0, 1]", v.name);
  v.lower = lower;
  v.upper = upper;
}

void Model::set_implied_integer(VarId var, bool flag) {
  check_var(var, "set_implied_integer");
  Variable& v = variables_[static_cast<size_t>(var.index)];
  if (flag && v.kind != VarKind::kContinuous)
    throw ValidationError("only continuous variables can be marked implied integer", v.name);
  v.implied_integer = flag;
}

void Model::set_kind(VarId var, VarKind kind) {
  check_var(var, "set_kind");
  Variable& v = variables_[static_cast<size_t>(var.index)];
  if (kind == VarKind::kBinary && (v.lower != 0.0 || v.upper != 1.0))
    throw ValidationError("binary variables must have bounds [0, 1]", v.name);
  if (kind == VarKind::kBinary) v.implied_integer = false;
  v.kind = kind;
}

int Model::num_binaries() const noexcept {
  return static_cast<int>(std::count_if(variables_.begin(), variables_.end(),
                                        [](const Variable& v) { return v.kind == VarKind::kBinary; }));
}

int Model::num_nonzeros() const noexcept {
  int n = 0;
  for (const auto& c : constraints_) n += static_cast<int>(c.terms.size());
  return n;
}

const Variable& Model::variable(VarId v) const {
  check_var(v, "variable");
  return variables_[static_cast<size_t>(v.index)];
}

const Constraint& Model::constraint(ConId c) const {
  if (c.index < 0 || c.index >= num_constraints()) throw ValidationError("unknown constraint handle");
  return constraints_[static_cast<size_t>(c.index)];
}

std::optional<VarId> Model::find_variable(const std::string& name) const {
  auto it = var_index_.find(name);
  if (it == var_index_.end()) return std::nullopt;
  return VarId{it->second};
}

std::optional<ConId> Model::find_constraint(const std::string& name) const {
  auto it = con_index_.find(name);
  if (it == con_index_.end()) return std::nullopt;
  return ConId{it->second};
}

double Model::evaluate(std::span<const double> values) const {
  double obj = 0.0;
  for (size_t j = 0; j < variables_.size(); ++j) obj += variables_[j].objective * values[j];
  return obj;
}

double Model::max_violation(std::span<const double> values) const {
  double worst = 0.0;
  for (size_t j = 0; j < variables_.size(); ++j) {
    worst = std::max(worst, variables_[j].lower - values[j]);
    worst = std::max(worst, values[j] - variables_[j].upper);
  }
  for (const auto& c : constraints_) {
    double act = 0.0;
    for (const Term& t : c.terms) act += t.coef * values[static_cast<size_t>(t.var.index)];
    if (c.sense != Sense::kGreaterEqual) worst = std::max(worst, act - c.rhs);
    if (c.sense != Sense::kLessEqual) worst = std::max(worst, c.rhs - act);
  }
  return worst;
}

bool Model::is_feasible(std::span<const double> values, double tol, double int_tol) const {
  if (values.size() != variables_.size()) return false;
  for (size_t j = 0; j < variables_.size(); ++j) {
    if (variables_[j].kind == VarKind::kBinary && std::min(std::abs(values[j]), std::abs(values[j] - 1.0)) > int_tol)
      return false;
  }
  return max_violation(values) <= tol;
}

bool Model::structurally_equal(const Model& other) const {
  if (variables_ != other.variables_) return false;
  if (constraints_.size() != other.constraints_.size()) return false;
  for (size_t i = 0; i < constraints_.size(); ++i) {
    const Constraint& a = constraints_[i];
    const Constraint& b = other.constraints_[i];
    if (a.name != b.name || a.sense != b.sense || a.rhs != b.rhs || a.terms.size() != b.terms.size()) return false;
    for (size_t k = 0; k < a.terms.size(); ++k) {
      if (a.terms[k].coef != b.terms[k].coef) return false;
      if (variables_[static_cast<size_t>(a.terms[k].var.index)].name !=
          other.variables_[static_cast<size_t>(b.terms[k].var.index)].name)
        return false;
    }
  }
  return true;
}

Model relax(const Model& model) {
  Model out = model;
  for (int j = 0; j < out.num_variables(); ++j) {
    const VarId v{j};
    out.set_kind(v, VarKind::kContinuous);
    out.set_implied_integer(v, false);
  }
  return out;
}

const char* to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::kOptimal: return "optimal";
    case SolveStatus::kInfeasible: return "infeasible";
    case SolveStatus::kUnbounded: return "unbounded";
    case SolveStatus::kNodeLimit: return "node_limit";
    case SolveStatus::kNumericalFailure: return "numerical_failure";
  }
  return "unknown";
}

}  // namespace ssfp::milp
