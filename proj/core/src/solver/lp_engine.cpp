#include "lp_engine.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>

namespace ssfp::solver::detail {

namespace {

bool finite(double v) { return std::isfinite(v); }

// Deterministic value in [0, 1) for column j, used to spread cost perturbations.
double column_hash(int j) {
  std::uint64_t z = static_cast<std::uint64_t>(j) + 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  z ^= z >> 31;
  return static_cast<double>(z >> 11) * 0x1.0p-53;
}

}  // namespace

// ---------------------------------------------------------------------------
// LpEngine setup

LpEngine::LpEngine(const milp::Model& model, LpSettings settings)
    : settings_(settings), factor_(&a_) {
  n_ = model.num_variables();
  m_ = model.num_constraints();
  a_.rows = m_;
  a_.cols = n_;
  const auto vars = model.variables();
  const auto cons = model.constraints();

  a_.row_start.assign(static_cast<size_t>(m_) + 1, 0);
  a_.col_start.assign(static_cast<size_t>(n_) + 1, 0);
  for (int i = 0; i < m_; ++i) {
    for (const milp::Term& t : cons[static_cast<size_t>(i)].terms) {
      if (t.coef == 0.0) continue;
      ++a_.row_start[static_cast<size_t>(i) + 1];
      ++a_.col_start[static_cast<size_t>(t.var.index) + 1];
    }
  }
  for (int i = 0; i < m_; ++i) a_.row_start[static_cast<size_t>(i) + 1] += a_.row_start[static_cast<size_t>(i)];
  for (int j = 0; j < n_; ++j) a_.col_start[static_cast<size_t>(j) + 1] += a_.col_start[static_cast<size_t>(j)];
  const auto nnz = static_cast<size_t>(a_.row_start.back());
  a_.col_index.resize(nnz);
  a_.row_value.resize(nnz);
  a_.row_index.resize(nnz);
  a_.col_value.resize(nnz);
  std::vector<int> fill(a_.col_start.begin(), a_.col_start.end() - 1);
  size_t k = 0;
  for (int i = 0; i < m_; ++i) {
    for (const milp::Term& t : cons[static_cast<size_t>(i)].terms) {
      if (t.coef == 0.0) continue;
      a_.col_index[k] = t.var.index;
      a_.row_value[k] = t.coef;
      ++k;
      const auto slot = static_cast<size_t>(fill[static_cast<size_t>(t.var.index)]++);
      a_.row_index[slot] = i;
      a_.col_value[slot] = t.coef;
    }
  }

  const auto total = static_cast<size_t>(n_ + m_);
  orig_cost_.assign(total, 0.0);
  rlo_.assign(total, 0.0);
  rup_.assign(total, 0.0);
  for (int j = 0; j < n_; ++j) {
    const milp::Variable& v = vars[static_cast<size_t>(j)];
    orig_cost_[static_cast<size_t>(j)] = v.objective;
    rlo_[static_cast<size_t>(j)] = v.lower;
    rup_[static_cast<size_t>(j)] = v.upper;
  }
  for (int i = 0; i < m_; ++i) {
    const milp::Constraint& c = cons[static_cast<size_t>(i)];
    const auto col = static_cast<size_t>(n_ + i);
    rlo_[col] = c.sense == milp::Sense::kLessEqual ? -milp::kInfinity : c.rhs;
    rup_[col] = c.sense == milp::Sense::kGreaterEqual ? milp::kInfinity : c.rhs;
  }
  cost_ = orig_cost_;
  lo_ = rlo_;
  up_ = rup_;
  x_.assign(total, 0.0);
  d_.assign(total, 0.0);
  status_.assign(total, VarStatus::kAtLower);
  pos_of_.assign(total, -1);
  basis_.assign(static_cast<size_t>(m_), 0);
  rho_.assign(static_cast<size_t>(m_), 0.0);
  alpha_row_.assign(total, 0.0);
  row_mark_.assign(total, 0);
  slack_basis();
}

void LpEngine::place_nonbasic(int j) {
  const auto u = static_cast<size_t>(j);
  const bool lo_fin = finite(lo_[u]);
  const bool up_fin = finite(up_[u]);
  if (lo_fin && (!up_fin || cost_[u] >= 0.0)) {
    status_[u] = VarStatus::kAtLower;
    x_[u] = lo_[u];
  } else if (up_fin) {
    status_[u] = VarStatus::kAtUpper;
    x_[u] = up_[u];
  } else {
    status_[u] = VarStatus::kSuperbasic;
    x_[u] = 0.0;
  }
}

void LpEngine::slack_basis() {
  for (int j = 0; j < n_; ++j) {
    pos_of_[static_cast<size_t>(j)] = -1;
    place_nonbasic(j);
  }
  for (int i = 0; i < m_; ++i) {
    const auto col = static_cast<size_t>(n_ + i);
    basis_[static_cast<size_t>(i)] = n_ + i;
    pos_of_[col] = i;
    status_[col] = VarStatus::kBasic;
  }
  dse_.assign(static_cast<size_t>(m_), 1.0);
  factored_ = false;
}

void LpEngine::set_bounds(int j, double lower, double upper) {
  const auto u = static_cast<size_t>(j);
  rlo_[u] = lo_[u] = lower;
  rup_[u] = up_[u] = upper;
}

bool LpEngine::refactor() {
  factored_ = factor_.factor(basis_);
  return factored_;
}

void LpEngine::column(int j, std::vector<double>& out) const {
  out.assign(static_cast<size_t>(m_), 0.0);
  if (j < n_) {
    for (int e = a_.col_start[static_cast<size_t>(j)]; e < a_.col_start[static_cast<size_t>(j) + 1]; ++e)
      out[static_cast<size_t>(a_.row_index[static_cast<size_t>(e)])] = a_.col_value[static_cast<size_t>(e)];
  } else {
    out[static_cast<size_t>(j - n_)] = -1.0;
  }
}

void LpEngine::recompute_primal() {
  work_.assign(static_cast<size_t>(m_), 0.0);
  for (int j = 0; j < cols(); ++j) {
    const auto u = static_cast<size_t>(j);
    if (status_[u] == VarStatus::kBasic) continue;
    const double xj = x_[u];
    if (xj == 0.0) continue;
    if (j < n_) {
      for (int e = a_.col_start[u]; e < a_.col_start[u + 1]; ++e)
        work_[static_cast<size_t>(a_.row_index[static_cast<size_t>(e)])] -= a_.col_value[static_cast<size_t>(e)] * xj;
    } else {
      work_[static_cast<size_t>(j - n_)] += xj;
    }
  }
  factor_.ftran(work_);
  for (int p = 0; p < m_; ++p) x_[static_cast<size_t>(basis_[static_cast<size_t>(p)])] = work_[static_cast<size_t>(p)];
}

void LpEngine::recompute_duals() {
  work_.assign(static_cast<size_t>(m_), 0.0);
  for (int p = 0; p < m_; ++p) work_[static_cast<size_t>(p)] = cost_[static_cast<size_t>(basis_[static_cast<size_t>(p)])];
  factor_.btran(work_);
  for (int j = 0; j < n_; ++j) {
    const auto u = static_cast<size_t>(j);
    if (status_[u] == VarStatus::kBasic) {
      d_[u] = 0.0;
      continue;
    }
    double s = cost_[u];
    for (int e = a_.col_start[u]; e < a_.col_start[u + 1]; ++e)
      s -= work_[static_cast<size_t>(a_.row_index[static_cast<size_t>(e)])] * a_.col_value[static_cast<size_t>(e)];
    d_[u] = s;
  }
  for (int i = 0; i < m_; ++i) {
    const auto col = static_cast<size_t>(n_ + i);
    d_[col] = status_[col] == VarStatus::kBasic ? 0.0 : work_[static_cast<size_t>(i)];
  }
}

void LpEngine::compute_pivot_row(const std::vector<double>& rho) {
  for (int j : row_touched_) {
    alpha_row_[static_cast<size_t>(j)] = 0.0;
    row_mark_[static_cast<size_t>(j)] = 0;
  }
  row_touched_.clear();
  for (int i = 0; i < m_; ++i) {
    const double r = rho[static_cast<size_t>(i)];
    if (std::abs(r) < 1e-14) continue;
    for (int e = a_.row_start[static_cast<size_t>(i)]; e < a_.row_start[static_cast<size_t>(i) + 1]; ++e) {
      const int j = a_.col_index[static_cast<size_t>(e)];
      const auto u = static_cast<size_t>(j);
      if (status_[u] == VarStatus::kBasic) continue;
      if (!row_mark_[u]) {
        row_mark_[u] = 1;
        row_touched_.push_back(j);
      }
      alpha_row_[u] += r * a_.row_value[static_cast<size_t>(e)];
    }
    const auto col = static_cast<size_t>(n_ + i);
    if (status_[col] != VarStatus::kBasic) {
      row_mark_[col] = 1;
      row_touched_.push_back(n_ + i);
      alpha_row_[col] = -r;
    }
  }
}

double LpEngine::max_primal_infeasibility() const {
  double worst = 0.0;
  for (int p = 0; p < m_; ++p) {
    const auto j = static_cast<size_t>(basis_[static_cast<size_t>(p)]);
    worst = std::max({worst, lo_[j] - x_[j], x_[j] - up_[j]});
  }
  return worst;
}

double LpEngine::max_dual_infeasibility() const {
  double worst = 0.0;
  for (int j = 0; j < cols(); ++j) {
    const auto u = static_cast<size_t>(j);
    if (status_[u] == VarStatus::kBasic || lo_[u] == up_[u]) continue;
    switch (status_[u]) {
      case VarStatus::kAtLower: worst = std::max(worst, -d_[u]); break;
      case VarStatus::kAtUpper: worst = std::max(worst, d_[u]); break;
      case VarStatus::kSuperbasic:
        if ((d_[u] < 0.0 && x_[u] < up_[u]) || (d_[u] > 0.0 && x_[u] > lo_[u])) worst = std::max(worst, std::abs(d_[u]));
        break;
      case VarStatus::kBasic: break;
    }
  }
  return worst;
}

bool LpEngine::make_dual_feasible(bool allow_artificial) {
  bool changed = false;
  const double tol = settings_.dual_tol;
  const double big = settings_.artificial_bound;
  for (int j = 0; j < cols(); ++j) {
    const auto u = static_cast<size_t>(j);
    if (status_[u] == VarStatus::kBasic || lo_[u] == up_[u]) continue;
    const double dj = d_[u];
    const bool want_upper = dj < -tol;
    const bool want_lower = dj > tol;
    if (status_[u] == VarStatus::kAtLower && !want_upper) continue;
    if (status_[u] == VarStatus::kAtUpper && !want_lower) continue;
    if (status_[u] == VarStatus::kSuperbasic && !want_upper && !want_lower) continue;
    if (want_upper) {
      if (!finite(up_[u])) {
        if (!allow_artificial) continue;
        up_[u] = std::max(finite(lo_[u]) ? lo_[u] : 0.0, x_[u]) + big;
        artificial_ = true;
      }
      status_[u] = VarStatus::kAtUpper;
      x_[u] = up_[u];
    } else {
      if (!finite(lo_[u])) {
        if (!allow_artificial) continue;
        lo_[u] = std::min(finite(up_[u]) ? up_[u] : 0.0, x_[u]) - big;
        artificial_ = true;
      }
      status_[u] = VarStatus::kAtLower;
      x_[u] = lo_[u];
    }
    changed = true;
  }
  if (changed) recompute_primal();
  return changed;
}

void LpEngine::perturb_costs() {
  for (int j = 0; j < n_; ++j) {
    const auto u = static_cast<size_t>(j);
    if (status_[u] == VarStatus::kBasic || lo_[u] == up_[u]) continue;
    const double xi = 5e-7 * (1.0 + std::abs(orig_cost_[u])) * (1.0 + column_hash(j));
    if (status_[u] == VarStatus::kAtLower) {
      cost_[u] += xi;
      d_[u] += xi;
    } else if (status_[u] == VarStatus::kAtUpper) {
      cost_[u] -= xi;
      d_[u] -= xi;
    }
  }
  perturbed_ = true;
}

void LpEngine::restore_costs() {
  cost_ = orig_cost_;
  perturbed_ = false;
}

void LpEngine::drop_artificial_bounds() {
  if (!artificial_) return;
  for (int j = 0; j < cols(); ++j) {
    const auto u = static_cast<size_t>(j);
    lo_[u] = rlo_[u];
    up_[u] = rup_[u];
    if (status_[u] == VarStatus::kAtLower && x_[u] != lo_[u]) status_[u] = VarStatus::kSuperbasic;
    if (status_[u] == VarStatus::kAtUpper && x_[u] != up_[u]) status_[u] = VarStatus::kSuperbasic;
  }
  artificial_ = false;
}

// ---------------------------------------------------------------------------
// Simplex phases

void LpEngine::pivot(int r, int q, const std::vector<double>& alpha_q, double theta_p, int leave_status) {
  const int leave = basis_[static_cast<size_t>(r)];
  for (int p = 0; p < m_; ++p) {
    const double a = alpha_q[static_cast<size_t>(p)];
    if (a != 0.0) x_[static_cast<size_t>(basis_[static_cast<size_t>(p)])] -= theta_p * a;
  }
  x_[static_cast<size_t>(q)] += theta_p;
  const auto lv = static_cast<size_t>(leave);
  const auto st = static_cast<VarStatus>(leave_status);
  status_[lv] = st;
  x_[lv] = st == VarStatus::kAtLower ? lo_[lv] : up_[lv];
  status_[static_cast<size_t>(q)] = VarStatus::kBasic;
  basis_[static_cast<size_t>(r)] = q;
  pos_of_[static_cast<size_t>(q)] = r;
  pos_of_[lv] = -1;
  factor_.add_eta(r, alpha_q);
  ++iterations_;
}

LpResult LpEngine::dual_phase() {
  struct Candidate {
    int j;
    double ratio;
    double abs_alpha;
    double dj;
  };
  std::vector<Candidate> cands;
  std::vector<int> flips;
  const double ptol = settings_.primal_tol;
  const double dtol = settings_.dual_tol;
  int degenerate = 0;
  bool bland = false;

  for (;;) {
    if (iterations_ >= limit_) return LpResult::kIterationLimit;
    if (!factored_ || factor_.num_etas() >= settings_.refactor_interval) {
      if (!refactor()) return LpResult::kNumericalFailure;
      recompute_primal();
      recompute_duals();
    }

    int r = -1;
    double best = 0.0;
    for (int p = 0; p < m_; ++p) {
      const auto j = static_cast<size_t>(basis_[static_cast<size_t>(p)]);
      double infeas;
      if (x_[j] < lo_[j] - ptol) {
        infeas = lo_[j] - x_[j];
      } else if (x_[j] > up_[j] + ptol) {
        infeas = x_[j] - up_[j];
      } else {
        continue;
      }
      if (bland) {
        if (r < 0 || basis_[static_cast<size_t>(p)] < basis_[static_cast<size_t>(r)]) r = p;
        continue;
      }
      const double score = infeas * infeas / dse_[static_cast<size_t>(p)];
      if (score > best) {
        best = score;
        r = p;
      }
    }
    if (r < 0) return LpResult::kOptimal;

    const int leave = basis_[static_cast<size_t>(r)];
    const auto lv = static_cast<size_t>(leave);
    const bool to_lower = x_[lv] < lo_[lv];
    const double target = to_lower ? lo_[lv] : up_[lv];
    double delta = x_[lv] - target;
    const double s = delta < 0.0 ? -1.0 : 1.0;

    rho_.assign(static_cast<size_t>(m_), 0.0);
    rho_[static_cast<size_t>(r)] = 1.0;
    factor_.btran(rho_);
    compute_pivot_row(rho_);

    cands.clear();
    for (int j : row_touched_) {
      const auto u = static_cast<size_t>(j);
      if (lo_[u] == up_[u]) continue;
      const double a = alpha_row_[u];
      if (std::abs(a) < settings_.pivot_tol) continue;
      const double abar = s * a;
      double sigma;
      switch (status_[u]) {
        case VarStatus::kAtLower:
          if (abar <= 0.0) continue;
          sigma = 1.0;
          break;
        case VarStatus::kAtUpper:
          if (abar >= 0.0) continue;
          sigma = -1.0;
          break;
        case VarStatus::kSuperbasic:
          sigma = abar > 0.0 ? 1.0 : -1.0;
          break;
        default:
          continue;
      }
      const double dj = sigma * d_[u];
      cands.push_back({j, std::max(dj, 0.0) / std::abs(abar), std::abs(abar), dj});
    }
    std::sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) {
      return a.ratio < b.ratio || (a.ratio == b.ratio && a.j < b.j);
    });

    int q = -1;
    flips.clear();
    double slope = std::abs(delta);
    size_t start = 0;
    while (start < cands.size()) {
      size_t end = start;
      if (bland) {
        const double tmin = cands[start].ratio;
        while (end < cands.size() && cands[end].ratio <= tmin + 1e-12) ++end;
        q = cands[start].j;
        for (size_t k = start; k < end; ++k) q = std::min(q, cands[k].j);
      } else {
        double tmax = milp::kInfinity;
        for (size_t e = start; e < cands.size() && cands[e].ratio <= tmax; ++e)
          tmax = std::min(tmax, (std::max(cands[e].dj, 0.0) + dtol) / cands[e].abs_alpha);
        double best_alpha = -1.0;
        while (end < cands.size() && cands[end].ratio <= tmax) {
          if (cands[end].abs_alpha > best_alpha) {
            best_alpha = cands[end].abs_alpha;
            q = cands[end].j;
          }
          ++end;
        }
      }
      if (settings_.bound_flipping) {
        double drop = 0.0;
        bool boxed = true;
        for (size_t k = start; k < end; ++k) {
          const auto u = static_cast<size_t>(cands[k].j);
          const double range = up_[u] - lo_[u];
          if (status_[u] == VarStatus::kSuperbasic || !finite(range)) {
            boxed = false;
            break;
          }
          drop += range * cands[k].abs_alpha;
        }
        if (boxed && slope - drop > ptol) {
          for (size_t k = start; k < end; ++k) flips.push_back(cands[k].j);
          slope -= drop;
          start = end;
          q = -1;
          continue;
        }
      }
      break;
    }
    if (q < 0) return LpResult::kInfeasible;

    const auto uq = static_cast<size_t>(q);
    const double alpha_rq = alpha_row_[uq];
    column(q, alpha_col_);
    factor_.ftran(alpha_col_);
    const double piv = alpha_col_[static_cast<size_t>(r)];
    if (std::abs(piv - alpha_rq) > 1e-7 * (1.0 + std::abs(alpha_rq)) || std::abs(piv) < settings_.pivot_tol) {
      if (factor_.num_etas() > 0) {
        factored_ = false;
        continue;
      }
      if (std::abs(piv) < settings_.pivot_tol) return LpResult::kNumericalFailure;
    }

    tau_ = rho_;
    factor_.ftran(tau_);
    double wr = 0.0;
    for (double v : rho_) wr += v * v;

    if (!flips.empty()) {
      work_.assign(static_cast<size_t>(m_), 0.0);
      for (int j : flips) {
        const auto u = static_cast<size_t>(j);
        const double from = x_[u];
        if (status_[u] == VarStatus::kAtLower) {
          status_[u] = VarStatus::kAtUpper;
          x_[u] = up_[u];
        } else {
          status_[u] = VarStatus::kAtLower;
          x_[u] = lo_[u];
        }
        const double dx = x_[u] - from;
        if (j < n_) {
          for (int e = a_.col_start[u]; e < a_.col_start[u + 1]; ++e)
            work_[static_cast<size_t>(a_.row_index[static_cast<size_t>(e)])] -= a_.col_value[static_cast<size_t>(e)] * dx;
        } else {
          work_[static_cast<size_t>(j - n_)] += dx;
        }
      }
      factor_.ftran(work_);
      for (int p = 0; p < m_; ++p) x_[static_cast<size_t>(basis_[static_cast<size_t>(p)])] += work_[static_cast<size_t>(p)];
      delta = x_[lv] - target;
    }

    const double theta_p = delta / piv;
    const double theta_d = d_[uq] / alpha_rq;
    for (int j : row_touched_) {
      if (j != q) d_[static_cast<size_t>(j)] -= theta_d * alpha_row_[static_cast<size_t>(j)];
    }
    d_[uq] = 0.0;
    d_[lv] = -theta_d;

    for (int p = 0; p < m_; ++p) {
      if (p == r) continue;
      const double a = alpha_col_[static_cast<size_t>(p)];
      if (a == 0.0) continue;
      const double ratio = a / piv;
      const double w = dse_[static_cast<size_t>(p)] + ratio * (ratio * wr - 2.0 * tau_[static_cast<size_t>(p)]);
      dse_[static_cast<size_t>(p)] = std::max(w, 1e-8);
    }
    dse_[static_cast<size_t>(r)] = std::max(wr / (piv * piv), 1e-8);

    pivot(r, q, alpha_col_, theta_p,
          static_cast<int>(to_lower ? VarStatus::kAtLower : VarStatus::kAtUpper));

    if (std::abs(theta_d) < 1e-12) {
      if (++degenerate > settings_.bland_after) bland = true;
    } else {
      degenerate = 0;
      bland = false;
    }
  }
}

LpResult LpEngine::primal_phase() {
  const double ptol = settings_.primal_tol;
  const double dtol = settings_.dual_tol;
  int degenerate = 0;
  bool bland = false;

  for (;;) {
    if (iterations_ >= limit_) return LpResult::kIterationLimit;
    if (!factored_ || factor_.num_etas() >= settings_.refactor_interval) {
      if (!refactor()) return LpResult::kNumericalFailure;
      recompute_primal();
      recompute_duals();
    }

    int q = -1;
    double best = 0.0;
    for (int j = 0; j < cols(); ++j) {
      const auto u = static_cast<size_t>(j);
      if (status_[u] == VarStatus::kBasic || lo_[u] == up_[u]) continue;
      const double dj = d_[u];
      bool candidate = false;
      switch (status_[u]) {
        case VarStatus::kAtLower: candidate = dj < -dtol; break;
        case VarStatus::kAtUpper: candidate = dj > dtol; break;
        case VarStatus::kSuperbasic: candidate = (dj < -dtol && x_[u] < up_[u]) || (dj > dtol && x_[u] > lo_[u]); break;
        case VarStatus::kBasic: break;
      }
      if (!candidate) continue;
      if (bland) {
        q = j;
        break;
      }
      if (std::abs(dj) > best) {
        best = std::abs(dj);
        q = j;
      }
    }
    if (q < 0) return LpResult::kOptimal;

    const auto uq = static_cast<size_t>(q);
    const double dir = d_[uq] < 0.0 ? 1.0 : -1.0;
    column(q, alpha_col_);
    factor_.ftran(alpha_col_);

    double tmax = milp::kInfinity;
    for (int p = 0; p < m_; ++p) {
      const double a = alpha_col_[static_cast<size_t>(p)];
      if (std::abs(a) < settings_.pivot_tol) continue;
      const double rate = -dir * a;
      const auto j = static_cast<size_t>(basis_[static_cast<size_t>(p)]);
      if (rate < 0.0 && finite(lo_[j])) tmax = std::min(tmax, (x_[j] - lo_[j] + ptol) / -rate);
      if (rate > 0.0 && finite(up_[j])) tmax = std::min(tmax, (up_[j] - x_[j] + ptol) / rate);
    }
    int r = -1;
    double t_leave = milp::kInfinity;
    double best_rate = 0.0;
    for (int p = 0; p < m_ && finite(tmax); ++p) {
      const double a = alpha_col_[static_cast<size_t>(p)];
      if (std::abs(a) < settings_.pivot_tol) continue;
      const double rate = -dir * a;
      const auto j = static_cast<size_t>(basis_[static_cast<size_t>(p)]);
      double t;
      if (rate < 0.0 && finite(lo_[j])) {
        t = (x_[j] - lo_[j]) / -rate;
      } else if (rate > 0.0 && finite(up_[j])) {
        t = (up_[j] - x_[j]) / rate;
      } else {
        continue;
      }
      if (t > tmax) continue;
      const bool better = bland ? (r < 0 || t < t_leave - 1e-12 ||
                                   (t <= t_leave + 1e-12 && basis_[static_cast<size_t>(p)] < basis_[static_cast<size_t>(r)]))
                                : std::abs(rate) > best_rate;
      if (better) {
        best_rate = std::abs(rate);
        r = p;
        t_leave = std::max(t, 0.0);
      }
    }
    const double t_own = dir > 0.0 ? up_[uq] - x_[uq] : x_[uq] - lo_[uq];
    if (r < 0 && !finite(t_own)) return LpResult::kUnbounded;

    if (t_own <= t_leave) {
      for (int p = 0; p < m_; ++p) {
        const double a = alpha_col_[static_cast<size_t>(p)];
        if (a != 0.0) x_[static_cast<size_t>(basis_[static_cast<size_t>(p)])] -= t_own * dir * a;
      }
      if (dir > 0.0) {
        x_[uq] = up_[uq];
        status_[uq] = VarStatus::kAtUpper;
      } else {
        x_[uq] = lo_[uq];
        status_[uq] = VarStatus::kAtLower;
      }
      ++iterations_;
      continue;
    }

    const double piv = alpha_col_[static_cast<size_t>(r)];
    rho_.assign(static_cast<size_t>(m_), 0.0);
    rho_[static_cast<size_t>(r)] = 1.0;
    factor_.btran(rho_);
    compute_pivot_row(rho_);
    const double alpha_rq = alpha_row_[uq];
    if (std::abs(piv - alpha_rq) > 1e-7 * (1.0 + std::abs(piv)) && factor_.num_etas() > 0) {
      factored_ = false;
      continue;
    }
    const int leave = basis_[static_cast<size_t>(r)];
    const double rate_r = -dir * piv;
    const bool to_lower = rate_r < 0.0;

    const double theta_d = d_[uq] / piv;
    for (int j : row_touched_) {
      if (j != q) d_[static_cast<size_t>(j)] -= theta_d * alpha_row_[static_cast<size_t>(j)];
    }
    d_[uq] = 0.0;
    d_[static_cast<size_t>(leave)] = -theta_d;
    dse_.assign(static_cast<size_t>(m_), 1.0);

    pivot(r, q, alpha_col_, t_leave * dir,
          static_cast<int>(to_lower ? VarStatus::kAtLower : VarStatus::kAtUpper));

    if (t_leave < 1e-12) {
      if (++degenerate > settings_.bland_after) bland = true;
    } else {
      degenerate = 0;
      bland = false;
    }
  }
}

LpResult LpEngine::solve() {
  const long long budget =
      settings_.iteration_limit > 0 ? settings_.iteration_limit : 20LL * (n_ + m_) + 10000;
  limit_ = iterations_ + budget;

  lo_ = rlo_;
  up_ = rup_;
  artificial_ = false;
  restore_costs();
  for (int j = 0; j < cols(); ++j) {
    const auto u = static_cast<size_t>(j);
    if (lo_[u] > up_[u]) return LpResult::kInfeasible;
    switch (status_[u]) {
      case VarStatus::kBasic: break;
      case VarStatus::kAtLower:
        if (finite(lo_[u])) {
          x_[u] = lo_[u];
        } else {
          place_nonbasic(j);
        }
        break;
      case VarStatus::kAtUpper:
        if (finite(up_[u])) {
          x_[u] = up_[u];
        } else {
          place_nonbasic(j);
        }
        break;
      case VarStatus::kSuperbasic:
        x_[u] = std::clamp(x_[u], finite(lo_[u]) ? lo_[u] : -milp::kInfinity, finite(up_[u]) ? up_[u] : milp::kInfinity);
        if (!finite(x_[u])) x_[u] = 0.0;
        break;
    }
  }

  if (!refactor()) {
    slack_basis();
    if (!refactor()) return LpResult::kNumericalFailure;
  }
  recompute_primal();
  recompute_duals();
  make_dual_feasible(true);
  if (settings_.perturb) perturb_costs();

  LpResult res = dual_phase();
  for (int round = 0; round < 6; ++round) {
    if (res != LpResult::kOptimal) {
      restore_costs();
      return res;
    }
    restore_costs();
    drop_artificial_bounds();
    if (!refactor()) return LpResult::kNumericalFailure;
    recompute_primal();
    recompute_duals();
    const double pinf = max_primal_infeasibility();
    const double dinf = max_dual_infeasibility();
    if (pinf <= settings_.primal_tol && dinf <= settings_.dual_tol) return LpResult::kOptimal;
    if (pinf <= settings_.primal_tol) {
      res = primal_phase();
    } else {
      if (dinf > settings_.dual_tol) make_dual_feasible(true);
      res = dual_phase();
    }
  }
  return LpResult::kNumericalFailure;
}

// ---------------------------------------------------------------------------
// Results

double LpEngine::objective() const {
  double obj = 0.0;
  for (int j = 0; j < n_; ++j) obj += orig_cost_[static_cast<size_t>(j)] * x_[static_cast<size_t>(j)];
  return obj;
}

std::vector<double> LpEngine::values() const { return {x_.begin(), x_.begin() + n_}; }

std::vector<double> LpEngine::reduced_costs() const { return {d_.begin(), d_.begin() + n_}; }

std::vector<double> LpEngine::row_duals() const {
  std::vector<double> y(static_cast<size_t>(m_), 0.0);
  for (int p = 0; p < m_; ++p) y[static_cast<size_t>(p)] = orig_cost_[static_cast<size_t>(basis_[static_cast<size_t>(p)])];
  if (m_ > 0) factor_.btran(y);
  return y;
}

std::vector<std::uint8_t> LpEngine::packed_basis() const {
  std::vector<std::uint8_t> out(static_cast<size_t>(cols() + 3) / 4, 0);
  for (int j = 0; j < cols(); ++j) {
    out[static_cast<size_t>(j) / 4] |=
        static_cast<std::uint8_t>(static_cast<unsigned>(status_[static_cast<size_t>(j)]) << (2 * (j % 4)));
  }
  return out;
}

void LpEngine::load_packed_basis(const std::vector<std::uint8_t>& packed) {
  if (packed.size() != static_cast<size_t>(cols() + 3) / 4) return;
  int basic = 0;
  for (int j = 0; j < cols(); ++j) {
    if (((packed[static_cast<size_t>(j) / 4] >> (2 * (j % 4))) & 3U) == 0) ++basic;
  }
  if (basic != m_) return;
  int p = 0;
  for (int j = 0; j < cols(); ++j) {
    const auto u = static_cast<size_t>(j);
    const auto st = static_cast<VarStatus>((packed[u / 4] >> (2 * (j % 4))) & 3U);
    status_[u] = st;
    if (st == VarStatus::kBasic) {
      basis_[static_cast<size_t>(p)] = j;
      pos_of_[u] = p++;
    } else {
      pos_of_[u] = -1;
      if (st == VarStatus::kAtLower) x_[u] = rlo_[u];
      if (st == VarStatus::kAtUpper) x_[u] = rup_[u];
      if (st == VarStatus::kSuperbasic) x_[u] = 0.0;
    }
  }
  dse_.assign(static_cast<size_t>(m_), 1.0);
  factored_ = false;
}

}  // namespace ssfp::solver::detail
