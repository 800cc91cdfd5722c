#pragma once

// Bounded revised simplex used by solve_lp and branch-and-bound.
//
// Internal form: min c'x  s.t.  A x - r = 0,  l <= (x, r) <= u.  Column j < n
// is structural, column n + i is the logical of row i (coefficient -1).

#include <cstdint>
#include <memory>
#include <vector>

#include "basis_factor.hpp"
#include "ssfp/milp/model.hpp"

namespace ssfp::solver::detail {

enum class VarStatus : std::uint8_t { kBasic = 0, kAtLower = 1, kAtUpper = 2, kSuperbasic = 3 };

enum class LpResult { kOptimal, kInfeasible, kUnbounded, kIterationLimit, kNumericalFailure };

struct LpSettings {
  double primal_tol = 1e-9;
  double dual_tol = 1e-9;
  double pivot_tol = 1e-9;
  int refactor_interval = 100;
  long long iteration_limit = -1;  // < 0: derived from the model size
  bool perturb = true;
  bool bound_flipping = true;
  int bland_after = 1000;  // consecutive degenerate pivots before Bland's rule
  double artificial_bound = 1e7;
};

class LpEngine {
 public:
  explicit LpEngine(const milp::Model& model, LpSettings settings = {});
  // The factor keeps a pointer to a_.
  LpEngine(const LpEngine&) = delete;
  LpEngine& operator=(const LpEngine&) = delete;

  int num_structurals() const noexcept { return n_; }
  int num_rows() const noexcept { return m_; }

  /// Changes the bounds of structural j; the current basis is kept.
  void set_bounds(int j, double lower, double upper);
  double lower(int j) const { return rlo_[static_cast<size_t>(j)]; }
  double upper(int j) const { return rup_[static_cast<size_t>(j)]; }

  LpResult solve();
  /// Iterations per solve() call; <= 0 restores the size-derived default.
  void set_iteration_limit(long long limit) { settings_.iteration_limit = limit; }

  /// Objective with the model's costs at the current point.
  double objective() const;
  double value(int j) const { return x_[static_cast<size_t>(j)]; }
  std::vector<double> values() const;
  /// Reduced cost of structural j (valid after an optimal solve).
  double reduced_cost(int j) const { return d_[static_cast<size_t>(j)]; }
  std::vector<double> reduced_costs() const;
  std::vector<double> row_duals() const;
  VarStatus status(int j) const { return status_[static_cast<size_t>(j)]; }

  /// Status of every column (structurals then logicals), two bits each.
  std::vector<std::uint8_t> packed_basis() const;
  /// Installs a basis produced by packed_basis(); ignored if malformed.
  void load_packed_basis(const std::vector<std::uint8_t>& packed);

  long long iterations() const noexcept { return iterations_; }

 private:
  int cols() const noexcept { return n_ + m_; }
  void slack_basis();
  bool refactor();
  void recompute_primal();
  void recompute_duals();
  void compute_pivot_row(const std::vector<double>& rho);
  void column(int j, std::vector<double>& out) const;  // dense a_j over rows
  void place_nonbasic(int j);
  bool make_dual_feasible(bool allow_artificial);
  void perturb_costs();
  void restore_costs();
  void drop_artificial_bounds();
  double max_primal_infeasibility() const;
  double max_dual_infeasibility() const;
  LpResult dual_phase();
  LpResult primal_phase();
  void pivot(int r, int q, const std::vector<double>& alpha_q, double theta_p, int leave_status);

  LpSettings settings_;
  int n_ = 0;
  int m_ = 0;
  SparseMatrix a_;
  BasisFactor factor_;
  bool factored_ = false;

  std::vector<double> cost_;       // working costs (maybe perturbed)
  std::vector<double> orig_cost_;
  std::vector<double> rlo_, rup_;  // true bounds
  std::vector<double> lo_, up_;    // working bounds (maybe artificial)
  std::vector<double> x_;
  std::vector<double> d_;
  std::vector<VarStatus> status_;
  std::vector<int> basis_;
  std::vector<int> pos_of_;
  std::vector<double> dse_;

  // Scratch.
  std::vector<double> rho_;
  std::vector<double> alpha_row_;
  std::vector<int> row_touched_;
  std::vector<char> row_mark_;
  std::vector<double> alpha_col_;
  std::vector<double> tau_;
  std::vector<double> work_;

  long long iterations_ = 0;
  long long limit_ = 0;
  bool perturbed_ = false;
  bool artificial_ = false;
};

}  // namespace ssfp::solver::detail
