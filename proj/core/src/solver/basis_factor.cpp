#include "basis_factor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ssfp::solver::detail {

namespace {

constexpr double kEtaDropTol = 1e-14;
constexpr double kFillDropTol = 1e-14;
constexpr double kThreshold = 0.1;
constexpr double kMinPivot = 1e-11;
constexpr int kSearchLimit = 4;

}  // namespace

void BasisFactor::Buckets::reset(int items, int max_key) {
  head.assign(static_cast<size_t>(max_key) + 2, -1);
  next.assign(static_cast<size_t>(items), -1);
  prev.assign(static_cast<size_t>(items), -1);
  key.assign(static_cast<size_t>(items), -1);
}

void BasisFactor::Buckets::insert(int item, int k) {
  const auto u = static_cast<size_t>(item);
  k = std::min(k, static_cast<int>(head.size()) - 1);
  key[u] = k;
  prev[u] = -1;
  next[u] = head[static_cast<size_t>(k)];
  if (next[u] >= 0) prev[static_cast<size_t>(next[u])] = item;
  head[static_cast<size_t>(k)] = item;
}

void BasisFactor::Buckets::remove(int item) {
  const auto u = static_cast<size_t>(item);
  if (key[u] < 0) return;
  if (prev[u] >= 0) {
    next[static_cast<size_t>(prev[u])] = next[u];
  } else {
    head[static_cast<size_t>(key[u])] = next[u];
  }
  if (next[u] >= 0) prev[static_cast<size_t>(next[u])] = prev[u];
  key[u] = -1;
}

void BasisFactor::load_active(const std::vector<int>& basis) {
  const int n = a_->cols;
  acol_.resize(static_cast<size_t>(m_));
  arow_.resize(static_cast<size_t>(m_));
  for (auto& c : acol_) c.clear();
  for (auto& r : arow_) r.clear();
  for (int p = 0; p < m_; ++p) {
    const int j = basis[static_cast<size_t>(p)];
    auto& col = acol_[static_cast<size_t>(p)];
    if (j >= n) {
      col.push_back({j - n, -1.0});
    } else {
      for (int e = a_->col_start[static_cast<size_t>(j)]; e < a_->col_start[static_cast<size_t>(j) + 1]; ++e)
        col.push_back({a_->row_index[static_cast<size_t>(e)], a_->col_value[static_cast<size_t>(e)]});
    }
    for (const Entry& e : col) arow_[static_cast<size_t>(e.index)].push_back(p);
  }
  row_done_.assign(static_cast<size_t>(m_), 0);
  col_done_.assign(static_cast<size_t>(m_), 0);
  col_max_.assign(static_cast<size_t>(m_), -1.0);
  mark_.assign(static_cast<size_t>(m_), -1);
  col_buckets_.reset(m_, m_);
  row_buckets_.reset(m_, m_);
  for (int p = 0; p < m_; ++p) col_buckets_.insert(p, static_cast<int>(acol_[static_cast<size_t>(p)].size()));
  for (int i = 0; i < m_; ++i) row_buckets_.insert(i, static_cast<int>(arow_[static_cast<size_t>(i)].size()));
}

int BasisFactor::find_in_col(int col, int row) const {
  const auto& c = acol_[static_cast<size_t>(col)];
  for (size_t t = 0; t < c.size(); ++t) {
    if (c[t].index == row) return static_cast<int>(t);
  }
  return -1;
}

bool BasisFactor::pick_pivot(int& row, int& col) {
  auto column_max = [&](int j) {
    double& cm = col_max_[static_cast<size_t>(j)];
    if (cm < 0.0) {
      cm = 0.0;
      for (const Entry& e : acol_[static_cast<size_t>(j)]) cm = std::max(cm, std::abs(e.value));
    }
    return cm;
  };
  long long best = std::numeric_limits<long long>::max();
  int searched = 0;
  row = col = -1;
  const int top = static_cast<int>(col_buckets_.head.size()) - 1;
  for (int cnt = 1; cnt <= top; ++cnt) {
    for (int j = col_buckets_.head[static_cast<size_t>(cnt)]; j >= 0; j = col_buckets_.next[static_cast<size_t>(j)]) {
      const auto& c = acol_[static_cast<size_t>(j)];
      const double cmax = column_max(j);
      for (const Entry& e : c) {
        const double a = std::abs(e.value);
        if (a < kMinPivot || a < kThreshold * cmax) continue;
        const long long merit = static_cast<long long>(cnt - 1) *
                                static_cast<long long>(arow_[static_cast<size_t>(e.index)].size() - 1);
        if (merit < best) {
          best = merit;
          row = e.index;
          col = j;
        }
      }
      if (best == 0 || (++searched >= kSearchLimit && row >= 0)) return true;
    }
    for (int i = row_buckets_.head[static_cast<size_t>(cnt)]; i >= 0; i = row_buckets_.next[static_cast<size_t>(i)]) {
      for (int j : arow_[static_cast<size_t>(i)]) {
        const int t = find_in_col(j, i);
        const double a = std::abs(acol_[static_cast<size_t>(j)][static_cast<size_t>(t)].value);
        if (a < kMinPivot || a < kThreshold * column_max(j)) continue;
        const long long merit = static_cast<long long>(cnt - 1) *
                                static_cast<long long>(acol_[static_cast<size_t>(j)].size() - 1);
        if (merit < best) {
          best = merit;
          row = i;
          col = j;
        }
      }
      if (best == 0 || (++searched >= kSearchLimit && row >= 0)) return true;
    }
    if (row >= 0 && best <= static_cast<long long>(cnt) * cnt) return true;
  }
  return row >= 0;
}

void BasisFactor::eliminate(int r, int c) {
  auto& pcol = acol_[static_cast<size_t>(c)];
  const int t = find_in_col(c, r);
  const double pv = pcol[static_cast<size_t>(t)].value;
  piv_row_.push_back(r);
  piv_col_.push_back(c);
  piv_val_.push_back(pv);
  col_buckets_.remove(c);
  row_buckets_.remove(r);
  col_done_[static_cast<size_t>(c)] = 1;
  row_done_[static_cast<size_t>(r)] = 1;

  const size_t l_begin = l_index_.size();
  for (const Entry& e : pcol) {
    if (e.index == r) continue;
    l_index_.push_back(e.index);
    l_value_.push_back(e.value / pv);
    auto& pat = arow_[static_cast<size_t>(e.index)];
    auto it = std::find(pat.begin(), pat.end(), c);
    *it = pat.back();
    pat.pop_back();
  }
  l_start_.push_back(static_cast<int>(l_index_.size()));
  pcol.clear();

  const size_t u_begin = u_index_.size();
  for (int j : arow_[static_cast<size_t>(r)]) {
    if (j == c) continue;
    auto& col = acol_[static_cast<size_t>(j)];
    const int s = find_in_col(j, r);
    u_index_.push_back(j);
    u_value_.push_back(col[static_cast<size_t>(s)].value);
    col[static_cast<size_t>(s)] = col.back();
    col.pop_back();
  }
  u_start_.push_back(static_cast<int>(u_index_.size()));
  arow_[static_cast<size_t>(r)].clear();

  const size_t l_end = l_index_.size();
  for (size_t ue = u_begin; ue < u_index_.size(); ++ue) {
    const int j = u_index_[ue];
    const double arj = u_value_[ue];
    auto& col = acol_[static_cast<size_t>(j)];
    for (size_t s = 0; s < col.size(); ++s) mark_[static_cast<size_t>(col[s].index)] = static_cast<int>(s);
    bool dropped = false;
    for (size_t le = l_begin; le < l_end; ++le) {
      const int i = l_index_[le];
      const double delta = -l_value_[le] * arj;
      const int s = mark_[static_cast<size_t>(i)];
      if (s >= 0) {
        double& v = col[static_cast<size_t>(s)].value;
        v += delta;
        if (std::abs(v) < kFillDropTol) dropped = true;
      } else {
        col.push_back({i, delta});
        arow_[static_cast<size_t>(i)].push_back(j);
      }
    }
    for (const Entry& e : col) mark_[static_cast<size_t>(e.index)] = -1;
    if (dropped) {
      size_t w = 0;
      for (size_t s = 0; s < col.size(); ++s) {
        if (std::abs(col[s].value) < kFillDropTol) {
          auto& pat = arow_[static_cast<size_t>(col[s].index)];
          auto it = std::find(pat.begin(), pat.end(), j);
          *it = pat.back();
          pat.pop_back();
          if (!row_done_[static_cast<size_t>(col[s].index)]) {
            row_buckets_.remove(col[s].index);
            row_buckets_.insert(col[s].index, static_cast<int>(pat.size()));
          }
        } else {
          col[w++] = col[s];
        }
      }
      col.resize(w);
    }
    col_max_[static_cast<size_t>(j)] = -1.0;
    col_buckets_.remove(j);
    col_buckets_.insert(j, static_cast<int>(col.size()));
  }
  for (size_t le = l_begin; le < l_end; ++le) {
    const int i = l_index_[le];
    row_buckets_.remove(i);
    row_buckets_.insert(i, static_cast<int>(arow_[static_cast<size_t>(i)].size()));
  }
}

void BasisFactor::build_solve_structures() {
  pivot_of_col_.assign(static_cast<size_t>(m_), -1);
  for (int k = 0; k < m_; ++k) pivot_of_col_[static_cast<size_t>(piv_col_[static_cast<size_t>(k)])] = k;

  uc_start_.assign(static_cast<size_t>(m_) + 1, 0);
  for (int j : u_index_) ++uc_start_[static_cast<size_t>(pivot_of_col_[static_cast<size_t>(j)]) + 1];
  for (int k = 0; k < m_; ++k) uc_start_[static_cast<size_t>(k) + 1] += uc_start_[static_cast<size_t>(k)];
  uc_index_.resize(u_index_.size());
  uc_value_.resize(u_index_.size());
  std::vector<int> fill(uc_start_.begin(), uc_start_.end() - 1);
  for (int k = 0; k < m_; ++k) {
    for (int e = u_start_[static_cast<size_t>(k)]; e < u_start_[static_cast<size_t>(k) + 1]; ++e) {
      const auto kk = static_cast<size_t>(pivot_of_col_[static_cast<size_t>(u_index_[static_cast<size_t>(e)])]);
      const auto slot = static_cast<size_t>(fill[kk]++);
      uc_index_[slot] = piv_row_[static_cast<size_t>(k)];
      uc_value_[slot] = u_value_[static_cast<size_t>(e)];
    }
  }

  lt_start_.assign(static_cast<size_t>(m_) + 1, 0);
  for (int i : l_index_) ++lt_start_[static_cast<size_t>(i) + 1];
  for (int i = 0; i < m_; ++i) lt_start_[static_cast<size_t>(i) + 1] += lt_start_[static_cast<size_t>(i)];
  lt_index_.resize(l_index_.size());
  lt_value_.resize(l_index_.size());
  fill.assign(lt_start_.begin(), lt_start_.end() - 1);
  for (int k = 0; k < m_; ++k) {
    for (int e = l_start_[static_cast<size_t>(k)]; e < l_start_[static_cast<size_t>(k) + 1]; ++e) {
      const auto slot = static_cast<size_t>(fill[static_cast<size_t>(l_index_[static_cast<size_t>(e)])]++);
      lt_index_[slot] = piv_row_[static_cast<size_t>(k)];
      lt_value_[slot] = l_value_[static_cast<size_t>(e)];
    }
  }
}

bool BasisFactor::factor(const std::vector<int>& basis) {
  m_ = a_->rows;
  eta_pivot_pos_.clear();
  eta_pivot_.clear();
  eta_start_.assign(1, 0);
  eta_index_.clear();
  eta_value_.clear();
  piv_row_.clear();
  piv_col_.clear();
  piv_val_.clear();
  l_start_.assign(1, 0);
  l_index_.clear();
  l_value_.clear();
  u_start_.assign(1, 0);
  u_index_.clear();
  u_value_.clear();
  work_.assign(static_cast<size_t>(m_), 0.0);

  load_active(basis);
  for (int k = 0; k < m_; ++k) {
    int r = -1;
    int c = -1;
    if (!pick_pivot(r, c)) return false;
    eliminate(r, c);
  }
  build_solve_structures();
  return true;
}

void BasisFactor::ftran(std::vector<double>& v) const {
  // v is indexed by row on entry; work_ receives the result by position.
  for (int k = 0; k < m_; ++k) {
    const double br = v[static_cast<size_t>(piv_row_[static_cast<size_t>(k)])];
    if (br == 0.0) continue;
    for (int e = l_start_[static_cast<size_t>(k)]; e < l_start_[static_cast<size_t>(k) + 1]; ++e)
      v[static_cast<size_t>(l_index_[static_cast<size_t>(e)])] -= l_value_[static_cast<size_t>(e)] * br;
  }
  std::fill(work_.begin(), work_.end(), 0.0);
  for (int k = m_ - 1; k >= 0; --k) {
    double xc = v[static_cast<size_t>(piv_row_[static_cast<size_t>(k)])];
    if (xc == 0.0) continue;
    xc /= piv_val_[static_cast<size_t>(k)];
    work_[static_cast<size_t>(piv_col_[static_cast<size_t>(k)])] = xc;
    for (int e = uc_start_[static_cast<size_t>(k)]; e < uc_start_[static_cast<size_t>(k) + 1]; ++e)
      v[static_cast<size_t>(uc_index_[static_cast<size_t>(e)])] -= uc_value_[static_cast<size_t>(e)] * xc;
  }
  v.swap(work_);
  for (size_t t = 0; t < eta_pivot_pos_.size(); ++t) {
    const auto r = static_cast<size_t>(eta_pivot_pos_[t]);
    v[r] /= eta_pivot_[t];
    const double xr = v[r];
    if (xr == 0.0) continue;
    for (int e = eta_start_[t]; e < eta_start_[t + 1]; ++e)
      v[static_cast<size_t>(eta_index_[static_cast<size_t>(e)])] -= eta_value_[static_cast<size_t>(e)] * xr;
  }
}

void BasisFactor::btran(std::vector<double>& v) const {
  for (size_t t = eta_pivot_pos_.size(); t-- > 0;) {
    const auto r = static_cast<size_t>(eta_pivot_pos_[t]);
    double s = v[r];
    for (int e = eta_start_[t]; e < eta_start_[t + 1]; ++e)
      s -= eta_value_[static_cast<size_t>(e)] * v[static_cast<size_t>(eta_index_[static_cast<size_t>(e)])];
    v[r] = s / eta_pivot_[t];
  }
  std::fill(work_.begin(), work_.end(), 0.0);
  for (int k = 0; k < m_; ++k) {
    double w = v[static_cast<size_t>(piv_col_[static_cast<size_t>(k)])];
    if (w == 0.0) continue;
    w /= piv_val_[static_cast<size_t>(k)];
    work_[static_cast<size_t>(piv_row_[static_cast<size_t>(k)])] = w;
    for (int e = u_start_[static_cast<size_t>(k)]; e < u_start_[static_cast<size_t>(k) + 1]; ++e)
      v[static_cast<size_t>(u_index_[static_cast<size_t>(e)])] -= u_value_[static_cast<size_t>(e)] * w;
  }
  for (int k = m_ - 1; k >= 0; --k) {
    const auto i = static_cast<size_t>(piv_row_[static_cast<size_t>(k)]);
    const double yi = work_[i];
    if (yi == 0.0) continue;
    for (int e = lt_start_[i]; e < lt_start_[i + 1]; ++e)
      work_[static_cast<size_t>(lt_index_[static_cast<size_t>(e)])] -= lt_value_[static_cast<size_t>(e)] * yi;
  }
  v.swap(work_);
}

void BasisFactor::add_eta(int position, const std::vector<double>& column) {
  eta_pivot_pos_.push_back(position);
  eta_pivot_.push_back(column[static_cast<size_t>(position)]);
  for (int i = 0; i < m_; ++i) {
    const double a = column[static_cast<size_t>(i)];
    if (i != position && std::abs(a) > kEtaDropTol) {
      eta_index_.push_back(i);
      eta_value_.push_back(a);
    }
  }
  eta_start_.push_back(static_cast<int>(eta_index_.size()));
}

}  // namespace ssfp::solver::detail
