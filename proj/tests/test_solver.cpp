#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <random>
#include <vector>

#include "solver/basis_factor.hpp"
#include "ssfp/error.hpp"
#include "ssfp/milp/model.hpp"
#include "ssfp/solver/branch_and_bound.hpp"
#include "ssfp/solver/simplex.hpp"

using namespace ssfp;
using namespace ssfp::milp;

namespace {

// Dense Gaussian elimination with partial pivoting; returns false if singular.
bool dense_solve(std::vector<std::vector<double>> a, std::vector<double>& b) {
  const size_t n = b.size();
  for (size_t k = 0; k < n; ++k) {
    size_t p = k;
    for (size_t i = k + 1; i < n; ++i)
      if (std::abs(a[i][k]) > std::abs(a[p][k])) p = i;
    if (std::abs(a[p][k]) < 1e-12) return false;
    std::swap(a[k], a[p]);
    std::swap(b[k], b[p]);
    for (size_t i = k + 1; i < n; ++i) {
      const double f = a[i][k] / a[k][k];
      for (size_t j = k; j < n; ++j) a[i][j] -= f * a[k][j];
      b[i] -= f * b[k];
    }
  }
  for (size_t k = n; k-- > 0;) {
    for (size_t j = k + 1; j < n; ++j) b[k] -= a[k][j] * b[j];
    b[k] /= a[k][k];
  }
  return true;
}

// Vertex enumeration oracle for min c'x over {x in [0, ub]^n : A x <= b}.
double vertex_oracle(const std::vector<std::vector<double>>& A, const std::vector<double>& b,
                     const std::vector<double>& c, double ub) {
  const size_t n = c.size();
  // Candidate hyperplanes: rows, x_j = 0, x_j = ub.
  std::vector<std::vector<double>> H;
  std::vector<double> h;
  for (size_t i = 0; i < A.size(); ++i) H.push_back(A[i]), h.push_back(b[i]);
  for (size_t j = 0; j < n; ++j) {
    std::vector<double> e(n, 0.0);
    e[j] = 1.0;
    H.push_back(e), h.push_back(0.0);
    H.push_back(e), h.push_back(ub);
  }
  double best = INFINITY;
  const size_t m = H.size();
  std::vector<size_t> idx(n);
  std::function<void(size_t, size_t)> rec = [&](size_t start, size_t depth) {
    if (depth == n) {
      std::vector<std::vector<double>> M;
      std::vector<double> r;
      for (size_t k : idx) M.push_back(H[k]), r.push_back(h[k]);
      if (!dense_solve(M, r)) return;
      for (size_t j = 0; j < n; ++j)
        if (r[j] < -1e-9 || r[j] > ub + 1e-9) return;
      for (size_t i = 0; i < A.size(); ++i) {
        double s = 0;
        for (size_t j = 0; j < n; ++j) s += A[i][j] * r[j];
        if (s > b[i] + 1e-9) return;
      }
      double v = 0;
      for (size_t j = 0; j < n; ++j) v += c[j] * r[j];
      best = std::min(best, v);
      return;
    }
    for (size_t k = start; k < m; ++k) {
      idx[depth] = k;
      rec(k + 1, depth + 1);
    }
  };
  rec(0, 0);
  return best;
}

}  // namespace

TEST(Simplex, TextbookLp) {
  Model m;
  const VarId x = m.add_continuous("x", 0, kInfinity, -1);
  const VarId y = m.add_continuous("y", 0, kInfinity, -1);
  m.add_constraint("a", {{x, 1}, {y, 2}}, Sense::kLessEqual, 4);
  m.add_constraint("b", {{x, 3}, {y, 1}}, Sense::kLessEqual, 6);
  const Solution s = solver::solve_lp(m);
  ASSERT_EQ(s.status, SolveStatus::kOptimal);
  EXPECT_NEAR(s.objective, -14.0 / 5.0, 1e-9);
  EXPECT_NEAR(s.value(x), 8.0 / 5.0, 1e-9);
  EXPECT_NEAR(s.value(y), 6.0 / 5.0, 1e-9);
  // Both rows bind; duals solve [1 3; 2 1] w = [-1 -1].
  ASSERT_EQ(s.row_duals.size(), 2u);
  EXPECT_NEAR(s.row_duals[0], -0.4, 1e-9);
  EXPECT_NEAR(s.row_duals[1], -0.2, 1e-9);
  EXPECT_NEAR(s.reduced_costs[0], 0.0, 1e-9);
}

TEST(Simplex, EqualityFreeAndBoundedColumns) {
  Model m;
  const VarId x = m.add_continuous("x", -kInfinity, kInfinity, 1);
  const VarId y = m.add_continuous("y", -2, 3, 2);
  m.add_constraint("e", {{x, 1}, {y, -1}}, Sense::kEqual, 1);
  m.add_constraint("g", {{x, 1}, {y, 1}}, Sense::kGreaterEqual, -10);
  const Solution s = solver::solve_lp(m);
  ASSERT_EQ(s.status, SolveStatus::kOptimal);
  EXPECT_NEAR(s.value(y), -2, 1e-9);
  EXPECT_NEAR(s.value(x), -1, 1e-9);
  EXPECT_NEAR(s.objective, -5, 1e-9);
}

TEST(Simplex, InfeasibleAndUnbounded) {
  Model inf;
  const VarId x = inf.add_continuous("x", 0, 1, 1);
  inf.add_constraint("c", {{x, 1}}, Sense::kGreaterEqual, 2);
  EXPECT_EQ(solver::solve_lp(inf).status, SolveStatus::kInfeasible);

  Model unb;
  const VarId u = unb.add_continuous("u", 0, kInfinity, -1);
  const VarId v = unb.add_continuous("v", 0, kInfinity, 0);
  unb.add_constraint("c", {{u, 1}, {v, -1}}, Sense::kLessEqual, 1);
  EXPECT_EQ(solver::solve_lp(unb).status, SolveStatus::kUnbounded);

  Model bin;
  bin.add_binary("b");
  EXPECT_THROW(solver::solve_lp(bin), ValidationError);
}

TEST(Simplex, RandomLpsMatchVertexEnumeration) {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> coef(-5, 5);
  std::uniform_real_distribution<double> rhs(1, 10);
  for (int trial = 0; trial < 150; ++trial) {
    const size_t n = 2 + trial % 3;
    const size_t rows = 2 + trial % 4;
    std::vector<std::vector<double>> A(rows, std::vector<double>(n));
    std::vector<double> b(rows), c(n);
    for (auto& r : A)
      for (double& v : r) v = std::round(coef(rng));
    for (double& v : b) v = std::round(rhs(rng));
    for (double& v : c) v = std::round(coef(rng));
    Model m;
    for (size_t j = 0; j < n; ++j) m.add_continuous("x" + std::to_string(j), 0, 4, c[j]);
    for (size_t i = 0; i < rows; ++i) {
      std::vector<Term> t;
      for (size_t j = 0; j < n; ++j) t.push_back({VarId{static_cast<int>(j)}, A[i][j]});
      m.add_constraint("r" + std::to_string(i), t, Sense::kLessEqual, b[i]);
    }
    const double oracle = vertex_oracle(A, b, c, 4);
    const Solution s = solver::solve_lp(m);
    ASSERT_EQ(s.status, SolveStatus::kOptimal) << "trial " << trial;  // x = 0 is feasible since b > 0
    EXPECT_NEAR(s.objective, oracle, 1e-7) << "trial " << trial;
    EXPECT_LE(m.max_violation(s.values), 1e-7);
  }
}

TEST(BasisFactor, MatchesDenseSolves) {
  using solver::detail::BasisFactor;
  using solver::detail::SparseMatrix;
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> val(-3, 3);
  for (int trial = 0; trial < 40; ++trial) {
    const int m = 5 + trial % 20;
    const int n = 2 * m;
    // Random sparse columns, about three entries each.
    std::vector<std::vector<std::pair<int, double>>> cols(static_cast<size_t>(n));
    for (auto& col : cols) {
      std::vector<int> rows(static_cast<size_t>(m));
      std::iota(rows.begin(), rows.end(), 0);
      std::shuffle(rows.begin(), rows.end(), rng);
      for (int k = 0; k < 3; ++k) col.push_back({rows[static_cast<size_t>(k)], std::round(val(rng) * 4) / 4 + 0.125});
      std::sort(col.begin(), col.end());
    }
    SparseMatrix a;
    a.rows = m;
    a.cols = n;
    a.col_start.push_back(0);
    for (auto& col : cols) {
      for (auto [r, v] : col) a.row_index.push_back(r), a.col_value.push_back(v);
      a.col_start.push_back(static_cast<int>(a.row_index.size()));
    }
    // Basis: random mix of structurals and slacks (column n + i is -e_i).
    std::vector<int> pool(static_cast<size_t>(n + m));
    std::iota(pool.begin(), pool.end(), 0);
    std::shuffle(pool.begin(), pool.end(), rng);
    std::vector<int> basis(pool.begin(), pool.begin() + m);
    std::vector<std::vector<double>> B(static_cast<size_t>(m), std::vector<double>(static_cast<size_t>(m), 0.0));
    for (int p = 0; p < m; ++p) {
      const int j = basis[static_cast<size_t>(p)];
      if (j >= n) {
        B[static_cast<size_t>(j - n)][static_cast<size_t>(p)] = -1.0;
      } else {
        for (auto [r, v] : cols[static_cast<size_t>(j)]) B[static_cast<size_t>(r)][static_cast<size_t>(p)] = v;
      }
    }
    std::vector<double> probe(static_cast<size_t>(m), 1.0);
    const bool regular = dense_solve(B, probe);
    BasisFactor f(&a);
    const bool ok = f.factor(basis);
    if (!regular) continue;  // the dense solver is the judge of singularity
    ASSERT_TRUE(ok) << "trial " << trial;

    std::vector<double> rhs(static_cast<size_t>(m));
    for (double& v : rhs) v = val(rng);
    std::vector<double> want = rhs;
    ASSERT_TRUE(dense_solve(B, want));
    std::vector<double> got = rhs;
    f.ftran(got);
    for (int i = 0; i < m; ++i) EXPECT_NEAR(got[static_cast<size_t>(i)], want[static_cast<size_t>(i)], 1e-8);

    std::vector<std::vector<double>> Bt(static_cast<size_t>(m), std::vector<double>(static_cast<size_t>(m)));
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) Bt[static_cast<size_t>(i)][static_cast<size_t>(j)] = B[static_cast<size_t>(j)][static_cast<size_t>(i)];
    want = rhs;
    ASSERT_TRUE(dense_solve(Bt, want));
    got = rhs;
    f.btran(got);
    for (int i = 0; i < m; ++i) EXPECT_NEAR(got[static_cast<size_t>(i)], want[static_cast<size_t>(i)], 1e-8);

    // One product-form update: replace position 0 by a slack not in the basis.
    int slack = -1;
    for (int i = 0; i < m && slack < 0; ++i)
      if (std::find(basis.begin(), basis.end(), n + i) == basis.end()) slack = n + i;
    if (slack < 0) continue;
    std::vector<double> column(static_cast<size_t>(m), 0.0);
    column[static_cast<size_t>(slack - n)] = -1.0;
    f.ftran(column);
    if (std::abs(column[0]) < 1e-6) continue;
    f.add_eta(0, column);
    for (int i = 0; i < m; ++i) B[static_cast<size_t>(i)][0] = (i == slack - n) ? -1.0 : 0.0;
    want = rhs;
    ASSERT_TRUE(dense_solve(B, want));
    got = rhs;
    f.ftran(got);
    for (int i = 0; i < m; ++i) EXPECT_NEAR(got[static_cast<size_t>(i)], want[static_cast<size_t>(i)], 1e-8);
    EXPECT_EQ(f.num_etas(), 1);
  }
}

TEST(BranchAndBound, KnapsacksMatchEnumeration) {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> w(1, 20);
  for (int trial = 0; trial < 60; ++trial) {
    const int n = 6 + trial % 7;
    std::vector<int> weight(static_cast<size_t>(n)), value(static_cast<size_t>(n));
    int total = 0;
    for (int i = 0; i < n; ++i) {
      weight[static_cast<size_t>(i)] = w(rng);
      value[static_cast<size_t>(i)] = w(rng);
      total += weight[static_cast<size_t>(i)];
    }
    const int cap = total / 2;
    Model m;
    std::vector<Term> row;
    for (int i = 0; i < n; ++i) row.push_back({m.add_binary("b" + std::to_string(i), -value[static_cast<size_t>(i)]), double(weight[static_cast<size_t>(i)])});
    m.add_constraint("cap", row, Sense::kLessEqual, cap);
    int best = 0;
    for (int mask = 0; mask < (1 << n); ++mask) {
      int wt = 0, v = 0;
      for (int i = 0; i < n; ++i)
        if (mask >> i & 1) wt += weight[static_cast<size_t>(i)], v += value[static_cast<size_t>(i)];
      if (wt <= cap) best = std::max(best, v);
    }
    for (auto br : {solver::Branching::kMostFractional, solver::Branching::kReliability}) {
      solver::BnbConfig cfg;
      cfg.branching = br;
      const Solution s = solver::solve_milp(m, cfg);
      ASSERT_EQ(s.status, SolveStatus::kOptimal);
      EXPECT_NEAR(s.objective, -best, 1e-9) << "trial " << trial;
      EXPECT_TRUE(m.is_feasible(s.values));
      EXPECT_LE(s.bound, s.objective + 1e-9);
      // A cutoff at the optimum keeps it; one below makes the search come back empty.
      cfg.cutoff = -best;
      EXPECT_NEAR(solver::solve_milp(m, cfg).objective, -best, 1e-9);
      EXPECT_LE(solver::solve_milp(m, cfg).node_count, s.node_count);
      cfg.cutoff = -best - 0.5;
      EXPECT_EQ(solver::solve_milp(m, cfg).status, SolveStatus::kInfeasible);
    }
  }
}

TEST(BranchAndBound, ImpliedIntegersAreBranchedOn) {
  // x continuous but flagged: the optimum must still put it at an integer.
  Model m;
  const VarId x = m.add_continuous("x", 0, 1, -1);
  const VarId y = m.add_continuous("y", 0, 1, -1);
  m.set_implied_integer(x);
  m.set_implied_integer(y);
  m.add_constraint("c", {{x, 2}, {y, 2}}, Sense::kLessEqual, 3);
  const Solution s = solver::solve_milp(m);
  ASSERT_EQ(s.status, SolveStatus::kOptimal);
  EXPECT_NEAR(s.objective, -1, 1e-9);
  for (double v : s.values) EXPECT_TRUE(std::abs(v) < 1e-6 || std::abs(v - 1) < 1e-6);
}

TEST(BranchAndBound, InfeasibleAndNodeLimit) {
  Model inf;
  const VarId a = inf.add_binary("a");
  const VarId b = inf.add_binary("b");
  inf.add_constraint("c", {{a, 2}, {b, 2}}, Sense::kEqual, 1);
  EXPECT_EQ(solver::solve_milp(inf).status, SolveStatus::kInfeasible);

  solver::BnbConfig one;
  one.node_limit = 1;
  Model hard;
  std::vector<Term> row;
  for (int i = 0; i < 9; ++i) row.push_back({hard.add_binary("h" + std::to_string(i), -1.0 - 0.01 * i), 2.0});
  hard.add_constraint("odd", row, Sense::kLessEqual, 9);
  const Solution s = solver::solve_milp(hard, one);
  EXPECT_EQ(s.status, SolveStatus::kNodeLimit);
  EXPECT_EQ(s.node_count, 1);
  one.node_limit = 0;
  EXPECT_THROW(solver::solve_milp(hard, one), ValidationError);
}
