#pragma once

#include <limits>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace ssfp::milp {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

enum class VarKind { kBinary, kContinuous };
enum class Sense { kLessEqual, kEqual, kGreaterEqual };

struct VarId {
  int index = -1;
  friend auto operator<=>(const VarId&, const VarId&) = default;
};

struct ConId {
  int index = -1;
  friend auto operator<=>(const ConId&, const ConId&) = default;
};

struct Term {
  VarId var;
  double coef = 0.0;
  friend bool operator==(const Term&, const Term&) = default;
};

struct Variable {
  std::string name;
  VarKind kind = VarKind::kContinuous;
  double lower = 0.0;
  double upper = kInfinity;
  double objective = 0.0;
  /// Continuous variable that takes 0/1 values in some optimal solution of the
  /// integer model. Branch-and-bound branches on it only after every binary
  /// is integral.
  bool implied_integer = false;
  friend bool operator==(const Variable&, const Variable&) = default;
};

struct Constraint {
  std::string name;
  std::vector<Term> terms;
  Sense sense = Sense::kLessEqual;
  double rhs = 0.0;
  friend bool operator==(const Constraint&, const Constraint&) = default;
};

/// Mixed-binary linear program, always minimised. Mutable while it is being
/// built; treat as immutable once handed to a solver.
class Model {
 public:
  Model() = default;
  explicit Model(std::string name) : name_(std::move(name)) {}

  /// Throws ValidationError on a duplicate or empty name, on bounds with
  /// lower > upper, or on a binary whose bounds are not [0, 1].
  VarId add_variable(std::string name, VarKind kind, double lower, double upper, double objective = 0.0);
  VarId add_binary(std::string name, double objective = 0.0) {
    return add_variable(std::move(name), VarKind::kBinary, 0.0, 1.0, objective);
  }
  VarId add_continuous(std::string name, double lower, double upper, double objective = 0.0) {
    return add_variable(std::move(name), VarKind::kContinuous, lower, upper, objective);
  }

  /// Repeated variables are merged by summing coefficients; terms that cancel
  /// to zero are kept so the row shape stays predictable.
  ConId add_constraint(std::string name, std::vector<Term> terms, Sense sense, double rhs);

  void set_objective(VarId var, double coef);
  /// Replaces the whole objective; unmentioned variables get coefficient 0.
  void set_objective(std::span<const Term> terms);
  void set_bounds(VarId var, double lower, double upper);
  void set_implied_integer(VarId var, bool flag = true);
  /// Switching to binary requires bounds [0, 1].
  void set_kind(VarId var, VarKind kind);

  const std::string& name() const noexcept { return name_; }
  int num_variables() const noexcept { return static_cast<int>(variables_.size()); }
  int num_constraints() const noexcept { return static_cast<int>(constraints_.size()); }
  int num_binaries() const noexcept;
  int num_nonzeros() const noexcept;

  const Variable& variable(VarId v) const;
  const Constraint& constraint(ConId c) const;
  std::span<const Variable> variables() const noexcept { return variables_; }
  std::span<const Constraint> constraints() const noexcept { return constraints_; }

  std::optional<VarId> find_variable(const std::string& name) const;
  std::optional<ConId> find_constraint(const std::string& name) const;

  /// Objective value of a full assignment.
  double evaluate(std::span<const double> values) const;
  /// Largest bound or row violation of `values` (0 when feasible).
  double max_violation(std::span<const double> values) const;
  /// Feasible within `tol`, with binaries within `int_tol` of {0, 1}.
  bool is_feasible(std::span<const double> values, double tol = 1e-9, double int_tol = 1e-6) const;

  /// Same variables (name, kind, bounds, objective, flag) and constraints, in
  /// the same order; terms compared by variable name.
  bool structurally_equal(const Model& other) const;

 private:
  void check_var(VarId v, const char* where) const;

  std::string name_;
  std::vector<Variable> variables_;
  std::vector<Constraint> constraints_;
  std::unordered_map<std::string, int> var_index_;
  std::unordered_map<std::string, int> con_index_;
};

/// LP relaxation: every binary becomes continuous on [0, 1] and implied
/// integrality markers are dropped. Objective and rows are unchanged.
Model relax(const Model& model);

enum class SolveStatus { kOptimal, kInfeasible, kUnbounded, kNodeLimit, kNumericalFailure };

const char* to_string(SolveStatus status);

struct Solution {
  SolveStatus status = SolveStatus::kNumericalFailure;
  double objective = kInfinity;
  std::vector<double> values;
  /// Best proven lower bound.
  double bound = -kInfinity;
  long long node_count = 0;
  long long lp_iterations = 0;
  double solve_seconds = 0.0;
  /// Objective of the root LP relaxation (B&B only).
  double root_bound = -kInfinity;
  /// Row duals and reduced costs of an optimal LP (empty for MILP solves).
  std::vector<double> row_duals;
  std::vector<double> reduced_costs;

  bool has_solution() const noexcept { return !values.empty(); }
  double value(VarId v) const { return values.at(static_cast<size_t>(v.index)); }
};

}  // namespace ssfp::milp
