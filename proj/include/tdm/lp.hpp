#pragma once

#include <vector>

#include "tdm/errors.hpp"

namespace tdm::lp {

enum class Sense { Eq, Le, Ge };
enum class Status { Optimal, Infeasible, Unbounded };

// min c^T x subject to per-row senses, x >= lower (default 0), optional
// upper bounds. Dense storage; rows must have uniform length.
struct Problem {
  std::vector<double> objective;
  std::vector<std::vector<double>> rows;
  std::vector<Sense> senses;
  std::vector<double> rhs;
  std::vector<double> lower;  // empty -> all zero
  std::vector<double> upper;  // empty -> none; +infinity marks unbounded entries

  int num_vars() const { return static_cast<int>(objective.size()); }
  int num_rows() const { return static_cast<int>(rows.size()); }
  void add_row(std::vector<double> a, Sense s, double b);
};

struct Solution {
  Status status = Status::Optimal;
  double objective = 0.0;
  std::vector<double> primal;
  std::vector<double> dual;    // one per declared row
  std::vector<double> farkas;  // infeasibility ray over declared rows
  // Basic column ids in solver indexing; opaque warm-start token, valid for
  // problems with identical shape (rows x columns, senses, bound pattern).
  std::vector<int> basis;
};

struct Options {
  double feas_tol = 1e-9;
  double pivot_tol = 1e-12;
  long max_pivots = 0;  // 0 -> scaled default
  const std::vector<int>* warm_basis = nullptr;
};

// Two-phase primal revised simplex with an explicit basis inverse.
// Dantzig pricing, Bland fallback after 5(m+n) degenerate pivots.
Solution solve(const Problem& p, const Options& opt = {});

struct Feasibility {
  bool feasible = false;
  std::vector<double> point;  // when feasible
  std::vector<double> ray;    // Farkas ray otherwise: A^T y sign-valid, b^T y < 0
  std::vector<int> basis;
};

Feasibility solve_feasibility(const std::vector<std::vector<double>>& rows,
                              const std::vector<Sense>& senses, const std::vector<double>& rhs,
                              const Options& opt = {});

}  // namespace tdm::lp
