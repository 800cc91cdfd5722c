#pragma once

// LU factorization of a simplex basis with product-form updates.
//
// The basis matrix B has one column per basis position; position p holds
// column basis[p] of [A | -I]. B is factored by right-looking sparse Gaussian
// elimination with Markowitz pivot choice and threshold partial pivoting.
// Triangular solves run on dense vectors and skip zero multipliers, which is
// where almost all of the speed comes from on network-like bases.

#include <vector>

namespace ssfp::solver::detail {

/// Column-compressed and row-compressed copies of the constraint matrix.
struct SparseMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<int> col_start, row_index;
  std::vector<double> col_value;
  std::vector<int> row_start, col_index;
  std::vector<double> row_value;
};

class BasisFactor {
 public:
  explicit BasisFactor(const SparseMatrix* a) : a_(a) {}

  /// Factors the basis given by `basis` (position -> column). False when the
  /// basis is numerically singular.
  bool factor(const std::vector<int>& basis);
  /// In: right-hand side over rows. Out: solution over basis positions.
  void ftran(std::vector<double>& v) const;
  /// In: vector over basis positions. Out: solution over rows.
  void btran(std::vector<double>& v) const;
  /// Records that position `position` now holds a column whose ftran is `column`.
  void add_eta(int position, const std::vector<double>& column);
  int num_etas() const noexcept { return static_cast<int>(eta_pivot_pos_.size()); }
  /// Nonzeros of L and U, diagonal excluded.
  long long factor_nonzeros() const noexcept {
    return static_cast<long long>(l_index_.size() + u_index_.size());
  }

 private:
  struct Entry {
    int index;
    double value;
  };
  // Doubly linked buckets keyed by active count, for the Markowitz search.
  struct Buckets {
    std::vector<int> head, next, prev, key;
    void reset(int items, int max_key);
    void insert(int item, int k);
    void remove(int item);
  };

  void load_active(const std::vector<int>& basis);
  bool pick_pivot(int& row, int& col);
  int find_in_col(int col, int row) const;
  void eliminate(int row, int col);
  void build_solve_structures();

  const SparseMatrix* a_;
  int m_ = 0;

  // Active submatrix during factorization: values by column, patterns by row.
  std::vector<std::vector<Entry>> acol_;
  std::vector<std::vector<int>> arow_;
  std::vector<char> row_done_, col_done_;
  Buckets col_buckets_, row_buckets_;
  std::vector<int> mark_;
  std::vector<double> col_max_;  // cached max |a| of active column, < 0 if stale

  // Pivot sequence.
  std::vector<int> piv_row_, piv_col_;
  std::vector<double> piv_val_;
  // L columns: elimination k subtracts l * (pivot row) from each listed row.
  std::vector<int> l_start_, l_index_;
  std::vector<double> l_value_;
  // L transposed: for a row, the (pivot row, l) pairs it contributes to.
  std::vector<int> lt_start_, lt_index_;
  std::vector<double> lt_value_;
  // U rows by pivot: (column, value) of columns pivoted later.
  std::vector<int> u_start_, u_index_;
  std::vector<double> u_value_;
  // U columns by pivot: (row, value) of rows pivoted earlier.
  std::vector<int> uc_start_, uc_index_;
  std::vector<double> uc_value_;
  std::vector<int> pivot_of_col_;

  mutable std::vector<double> work_;

  // Eta file.
  std::vector<int> eta_pivot_pos_;
  std::vector<double> eta_pivot_;
  std::vector<int> eta_start_;
  std::vector<int> eta_index_;
  std::vector<double> eta_value_;
};

}  // namespace ssfp::solver::detail
