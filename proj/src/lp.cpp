#include "tdm/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace tdm::lp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Internal equality form: A x = b with b >= 0 and column blocks
// [structural | slacks | artificials]. Column-major storage: pricing and
// FTRAN walk whole columns. `flip` records row sign changes relative to the
// declared orientation.
struct Tableau {
  int m = 0;
  int n_struct = 0;
  int n_total = 0;
  int art_begin = 0;
  std::vector<double> a;  // column-major, column j at offset j*m
  std::vector<double> b;
  std::vector<double> flip;

  double at(int i, int j) const { return a[static_cast<size_t>(j) * m + i]; }
  double& at(int i, int j) { return a[static_cast<size_t>(j) * m + i]; }
  const double* col(int j) const { return a.data() + static_cast<size_t>(j) * m; }
};

class Simplex {
 public:
  Simplex(const Problem& p, const Options& opt) : opt_(opt) { build(p); }

  Solution run(const Problem& p) {
    Solution sol;
    pivots_left_ = opt_.max_pivots > 0 ? opt_.max_pivots
                                       : 10000L + 30L * t_.m + 2L * t_.n_total;
    dropped_.assign(static_cast<size_t>(t_.n_total), 0);
    bool warm = try_warm_start();
    if (!warm) {
      if (!phase_one(sol)) return sol;  // Infeasible, farkas filled
    }
    phase_two(p, sol);
    return sol;
  }

 private:
  Options opt_;
  Tableau t_;
  int declared_rows_ = 0;
  std::vector<double> cost_;    // active objective over internal columns
  std::vector<int> basis_;      // per row
  std::vector<char> in_basis_;  // per column
  std::vector<double> binv_;    // m x m row-major
  std::vector<double> xb_;      // basic values
  std::vector<double> lower_shift_;
  long pivots_left_ = 0;
  long degenerate_streak_ = 0;
  bool bland_ = false;
  bool block_artificials_ = false;
  std::vector<char> dropped_;  // artificials discarded after leaving the basis

  double& binv(int i, int j) { return binv_[static_cast<size_t>(i) * t_.m + j]; }
  double binv(int i, int j) const { return binv_[static_cast<size_t>(i) * t_.m + j]; }

  void build(const Problem& p) {
    int n = p.num_vars();
    int m_decl = p.num_rows();
    declared_rows_ = m_decl;
    if (static_cast<int>(p.senses.size()) != m_decl || static_cast<int>(p.rhs.size()) != m_decl)
      fail(Errc::BadShape, "row/sense/rhs counts differ");
    for (const auto& row : p.rows)
      if (static_cast<int>(row.size()) != n) fail(Errc::BadShape, "row length mismatch");

    lower_shift_.assign(static_cast<size_t>(n), 0.0);
    if (!p.lower.empty()) {
      if (static_cast<int>(p.lower.size()) != n) fail(Errc::BadShape, "lower bound length");
      lower_shift_ = p.lower;
    }

    std::vector<int> ub_vars;
    if (!p.upper.empty()) {
      if (static_cast<int>(p.upper.size()) != n) fail(Errc::BadShape, "upper bound length");
      for (int j = 0; j < n; ++j)
        if (p.upper[static_cast<size_t>(j)] < kInf) ub_vars.push_back(j);
    }

    int m = m_decl + static_cast<int>(ub_vars.size());
    int n_slack = static_cast<int>(ub_vars.size());
    for (Sense s : p.senses)
      if (s != Sense::Eq) ++n_slack;

    t_.m = m;
    t_.n_struct = n;
    std::vector<int> row_slack(static_cast<size_t>(m), -1);
    std::vector<double> slack_sign(static_cast<size_t>(m), 0.0);
    {
      int slack = n;
      for (int i = 0; i < m_decl; ++i) {
        if (p.senses[static_cast<size_t>(i)] == Sense::Le) {
          row_slack[static_cast<size_t>(i)] = slack++;
          slack_sign[static_cast<size_t>(i)] = 1.0;
        } else if (p.senses[static_cast<size_t>(i)] == Sense::Ge) {
          row_slack[static_cast<size_t>(i)] = slack++;
          slack_sign[static_cast<size_t>(i)] = -1.0;
        }
      }
      for (size_t k = 0; k < ub_vars.size(); ++k) {
        row_slack[static_cast<size_t>(m_decl) + k] = slack++;
        slack_sign[static_cast<size_t>(m_decl) + k] = 1.0;
      }
    }

    t_.b.assign(static_cast<size_t>(m), 0.0);
    t_.flip.assign(static_cast<size_t>(m), 1.0);
    for (int i = 0; i < m_decl; ++i) {
      double shift = 0.0;
      for (int j = 0; j < n; ++j) shift += p.rows[static_cast<size_t>(i)][static_cast<size_t>(j)] * lower_shift_[static_cast<size_t>(j)];
      t_.b[static_cast<size_t>(i)] = p.rhs[static_cast<size_t>(i)] - shift;
    }
    for (size_t k = 0; k < ub_vars.size(); ++k)
      t_.b[static_cast<size_t>(m_decl) + k] =
          p.upper[static_cast<size_t>(ub_vars[k])] - lower_shift_[static_cast<size_t>(ub_vars[k])];
    for (int i = 0; i < m; ++i)
      if (t_.b[static_cast<size_t>(i)] < 0) {
        t_.b[static_cast<size_t>(i)] = -t_.b[static_cast<size_t>(i)];
        t_.flip[static_cast<size_t>(i)] = -1.0;
      }

    // initial basis: slack where its post-flip coefficient is +1, artificial otherwise
    basis_.assign(static_cast<size_t>(m), -1);
    std::vector<int> art_rows;
    for (int i = 0; i < m; ++i) {
      if (row_slack[static_cast<size_t>(i)] >= 0 &&
          slack_sign[static_cast<size_t>(i)] * t_.flip[static_cast<size_t>(i)] > 0.0)
        basis_[static_cast<size_t>(i)] = row_slack[static_cast<size_t>(i)];
      else
        art_rows.push_back(i);
    }
    t_.art_begin = n + n_slack;
    t_.n_total = t_.art_begin + static_cast<int>(art_rows.size());

    t_.a.assign(static_cast<size_t>(t_.n_total) * m, 0.0);
    for (int j = 0; j < n; ++j) {
      for (int i = 0; i < m_decl; ++i) t_.at(i, j) = t_.flip[static_cast<size_t>(i)] * p.rows[static_cast<size_t>(i)][static_cast<size_t>(j)];
      for (size_t k = 0; k < ub_vars.size(); ++k)
        if (ub_vars[k] == j) t_.at(m_decl + static_cast<int>(k), j) = t_.flip[static_cast<size_t>(m_decl) + k];
    }
    for (int i = 0; i < m; ++i)
      if (row_slack[static_cast<size_t>(i)] >= 0)
        t_.at(i, row_slack[static_cast<size_t>(i)]) = slack_sign[static_cast<size_t>(i)] * t_.flip[static_cast<size_t>(i)];
    for (size_t k = 0; k < art_rows.size(); ++k) {
      int i = art_rows[k];
      int col = t_.art_begin + static_cast<int>(k);
      t_.at(i, col) = 1.0;
      basis_[static_cast<size_t>(i)] = col;
    }

    in_basis_.assign(static_cast<size_t>(t_.n_total), 0);
    for (int c : basis_) in_basis_[static_cast<size_t>(c)] = 1;
    binv_.assign(static_cast<size_t>(m) * m, 0.0);
    for (int i = 0; i < m; ++i) binv(i, i) = 1.0;
    xb_ = t_.b;
  }

  bool refactor() {
    int m = t_.m;
    std::vector<double> work(static_cast<size_t>(m) * 2 * m, 0.0);
    auto w = [&](int i, int j) -> double& { return work[static_cast<size_t>(i) * 2 * m + j]; };
    for (int i = 0; i < m; ++i) {
      const double* col = t_.col(basis_[static_cast<size_t>(i)]);
      for (int r = 0; r < m; ++r) w(r, i) = col[r];
      w(i, m + i) = 1.0;
    }
    for (int col = 0; col < m; ++col) {
      int piv = col;
      double best = std::abs(w(col, col));
      for (int r = col + 1; r < m; ++r)
        if (std::abs(w(r, col)) > best) {
          best = std::abs(w(r, col));
          piv = r;
        }
      if (best < 1e-11) return false;
      if (piv != col)
        for (int j = 0; j < 2 * m; ++j) std::swap(w(piv, j), w(col, j));
      double inv = 1.0 / w(col, col);
      for (int j = 0; j < 2 * m; ++j) w(col, j) *= inv;
      for (int r = 0; r < m; ++r) {
        if (r == col) continue;
        double f = w(r, col);
        if (f == 0.0) continue;
        for (int j = 0; j < 2 * m; ++j) w(r, j) -= f * w(col, j);
      }
    }
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) binv(i, j) = w(i, m + j);
    recompute_xb();
    return true;
  }

  void recompute_xb() {
    int m = t_.m;
    xb_.assign(static_cast<size_t>(m), 0.0);
    for (int i = 0; i < m; ++i) {
      double s = 0.0;
      for (int j = 0; j < m; ++j) s += binv(i, j) * t_.b[static_cast<size_t>(j)];
      xb_[static_cast<size_t>(i)] = s;
    }
  }

  bool try_warm_start() {
    if (!opt_.warm_basis) return false;
    const std::vector<int>& wb = *opt_.warm_basis;
    if (static_cast<int>(wb.size()) != t_.m) return false;
    for (int c : wb)
      if (c < 0 || c >= t_.n_total) return false;
    std::vector<int> saved = basis_;
    basis_ = wb;
    bool ok = refactor();
    if (ok)
      for (int i = 0; i < t_.m; ++i) {
        bool art = basis_[static_cast<size_t>(i)] >= t_.art_begin;
        if (xb_[static_cast<size_t>(i)] < -opt_.feas_tol ||
            (art && std::abs(xb_[static_cast<size_t>(i)]) > opt_.feas_tol)) {
          ok = false;
          break;
        }
      }
    if (!ok) {
      basis_ = saved;
      binv_.assign(static_cast<size_t>(t_.m) * t_.m, 0.0);
      for (int i = 0; i < t_.m; ++i) binv(i, i) = 1.0;
      xb_ = t_.b;
      return false;
    }
    in_basis_.assign(static_cast<size_t>(t_.n_total), 0);
    for (int c : basis_) in_basis_[static_cast<size_t>(c)] = 1;
    return true;
  }

  std::vector<double> dual_prices() const {
    int m = t_.m;
    std::vector<double> y(static_cast<size_t>(m), 0.0);
    for (int i = 0; i < m; ++i) {
      double cb = cost_[static_cast<size_t>(basis_[static_cast<size_t>(i)])];
      if (cb == 0.0) continue;
      const double* row = binv_.data() + static_cast<size_t>(i) * m;
      for (int j = 0; j < m; ++j) y[static_cast<size_t>(j)] += cb * row[j];
    }
    return y;
  }

  // returns Optimal or Unbounded
  Status iterate() {
    int m = t_.m;
    long refactor_countdown = 128;
    while (true) {
      std::vector<double> y = dual_prices();
      int enter = -1;
      double best_rc = -opt_.feas_tol;
      int scan_end = block_artificials_ ? t_.art_begin : t_.n_total;
      for (int j = 0; j < scan_end; ++j) {
        if (in_basis_[static_cast<size_t>(j)] || dropped_[static_cast<size_t>(j)]) continue;
        const double* col = t_.col(j);
        double rc = cost_[static_cast<size_t>(j)];
        for (int i = 0; i < m; ++i) rc -= y[static_cast<size_t>(i)] * col[i];
        if (rc < best_rc) {
          best_rc = rc;
          enter = j;
          if (bland_) break;
        }
      }
      if (enter < 0) return Status::Optimal;

      std::vector<double> w(static_cast<size_t>(m), 0.0);
      {
        const double* col = t_.col(enter);
        for (int k = 0; k < m; ++k) {
          double ak = col[k];
          if (ak == 0.0) continue;
          for (int i = 0; i < m; ++i) w[static_cast<size_t>(i)] += binv(i, k) * ak;
        }
      }

      int leave = -1;
      double best_ratio = kInf;
      bool leave_art = false;
      for (int i = 0; i < m; ++i) {
        bool art = basis_[static_cast<size_t>(i)] >= t_.art_begin;
        double ratio;
        if (w[static_cast<size_t>(i)] > opt_.pivot_tol)
          ratio = std::max(xb_[static_cast<size_t>(i)], 0.0) / w[static_cast<size_t>(i)];
        else if (art && std::abs(w[static_cast<size_t>(i)]) > opt_.pivot_tol &&
                 xb_[static_cast<size_t>(i)] <= opt_.feas_tol)
          ratio = 0.0;  // artificials must stay at zero; force them out
        else
          continue;
        bool take;
        if (leave < 0)
          take = true;
        else if (ratio < best_ratio - 1e-12)
          take = true;
        else if (ratio > best_ratio + 1e-12)
          take = false;
        else if (bland_)
          take = basis_[static_cast<size_t>(i)] < basis_[static_cast<size_t>(leave)];
        else if (art != leave_art)
          take = art;
        else
          take = std::abs(w[static_cast<size_t>(i)]) > std::abs(w[static_cast<size_t>(leave)]);
        if (take) {
          leave = i;
          best_ratio = ratio;
          leave_art = art;
        }
      }
      if (leave < 0) return Status::Unbounded;

      if (--pivots_left_ < 0) fail(Errc::NumericalBreakdown, "pivot budget exhausted");
      double theta = best_ratio;
      // the counter never resets: any phase stuck in long degenerate runs
      // finishes under Bland's rule
      if (theta <= opt_.feas_tol && ++degenerate_streak_ > 5L * (t_.m + t_.n_total) && !bland_)
        bland_ = true;

      double inv = 1.0 / w[static_cast<size_t>(leave)];
      double* brow = binv_.data() + static_cast<size_t>(leave) * m;
      for (int j = 0; j < m; ++j) brow[j] *= inv;
      for (int i = 0; i < m; ++i) {
        if (i == leave) continue;
        double f = w[static_cast<size_t>(i)];
        if (f == 0.0) continue;
        double* row = binv_.data() + static_cast<size_t>(i) * m;
        for (int j = 0; j < m; ++j) row[j] -= f * brow[j];
        xb_[static_cast<size_t>(i)] -= theta * f;
        if (xb_[static_cast<size_t>(i)] < 0 && xb_[static_cast<size_t>(i)] > -1e-13)
          xb_[static_cast<size_t>(i)] = 0.0;
      }
      xb_[static_cast<size_t>(leave)] = theta;
      const int leaving_col = basis_[static_cast<size_t>(leave)];
      in_basis_[static_cast<size_t>(leaving_col)] = 0;
      if (leaving_col >= t_.art_begin) dropped_[static_cast<size_t>(leaving_col)] = 1;
      in_basis_[static_cast<size_t>(enter)] = 1;
      basis_[static_cast<size_t>(leave)] = enter;

      if (--refactor_countdown <= 0) {
        refactor_countdown = 128;
        if (!refactor()) fail(Errc::NumericalBreakdown, "basis matrix became singular");
      }
    }
  }

  bool phase_one(Solution& sol) {
    cost_.assign(static_cast<size_t>(t_.n_total), 0.0);
    for (int j = t_.art_begin; j < t_.n_total; ++j) cost_[static_cast<size_t>(j)] = 1.0;
    block_artificials_ = false;
    iterate();  // phase-I objective is bounded below by 0, Unbounded impossible
    double infeas = 0.0;
    for (int i = 0; i < t_.m; ++i)
      if (basis_[static_cast<size_t>(i)] >= t_.art_begin)
        infeas += std::max(xb_[static_cast<size_t>(i)], 0.0);
    if (infeas > opt_.feas_tol) {
      sol.status = Status::Infeasible;
      std::vector<double> y = dual_prices();
      sol.farkas.assign(static_cast<size_t>(declared_rows_), 0.0);
      for (int i = 0; i < declared_rows_; ++i)
        sol.farkas[static_cast<size_t>(i)] = -t_.flip[static_cast<size_t>(i)] * y[static_cast<size_t>(i)];
      return false;
    }
    return true;
  }

  void phase_two(const Problem& p, Solution& sol) {
    cost_.assign(static_cast<size_t>(t_.n_total), 0.0);
    for (int j = 0; j < t_.n_struct; ++j) cost_[static_cast<size_t>(j)] = p.objective[static_cast<size_t>(j)];
    block_artificials_ = true;
    bland_ = false;
    degenerate_streak_ = 0;
    Status st = iterate();
    if (st == Status::Unbounded) {
      sol.status = Status::Unbounded;
      return;
    }
    sol.status = Status::Optimal;
    sol.primal.assign(static_cast<size_t>(t_.n_struct), 0.0);
    for (int i = 0; i < t_.m; ++i)
      if (basis_[static_cast<size_t>(i)] < t_.n_struct)
        sol.primal[static_cast<size_t>(basis_[static_cast<size_t>(i)])] =
            std::max(xb_[static_cast<size_t>(i)], 0.0);
    for (int j = 0; j < t_.n_struct; ++j) sol.primal[static_cast<size_t>(j)] += lower_shift_[static_cast<size_t>(j)];
    sol.objective = 0.0;
    for (int j = 0; j < t_.n_struct; ++j)
      sol.objective += p.objective[static_cast<size_t>(j)] * sol.primal[static_cast<size_t>(j)];
    std::vector<double> y = dual_prices();
    sol.dual.assign(static_cast<size_t>(declared_rows_), 0.0);
    for (int i = 0; i < declared_rows_; ++i)
      sol.dual[static_cast<size_t>(i)] = t_.flip[static_cast<size_t>(i)] * y[static_cast<size_t>(i)];
    sol.basis = basis_;
  }
};

}  // namespace

void Problem::add_row(std::vector<double> a, Sense s, double b) {
  rows.push_back(std::move(a));
  senses.push_back(s);
  rhs.push_back(b);
}

Solution solve(const Problem& p, const Options& opt) {
  Simplex s(p, opt);
  return s.run(p);
}

Feasibility solve_feasibility(const std::vector<std::vector<double>>& rows,
                              const std::vector<Sense>& senses, const std::vector<double>& rhs,
                              const Options& opt) {
  Problem p;
  p.rows = rows;
  p.senses = senses;
  p.rhs = rhs;
  p.objective.assign(rows.empty() ? 0 : rows.front().size(), 0.0);
  Solution sol = solve(p, opt);
  Feasibility f;
  f.feasible = sol.status == Status::Optimal;
  if (f.feasible) {
    f.point = sol.primal;
    f.basis = sol.basis;
  } else {
    f.ray = sol.farkas;
  }
  return f;
}

}  // namespace tdm::lp
