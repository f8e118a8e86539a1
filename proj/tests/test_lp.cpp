#include <cmath>
#include <cstdint>
#include <vector>

#include "doctest.h"
#include "tdm/lp.hpp"

using namespace tdm;
using lp::Problem;
using lp::Sense;
using lp::Status;

namespace {

// deterministic pseudo-random stream for generated instances
struct Rng {
  std::uint64_t s;
  explicit Rng(std::uint64_t seed) : s(seed) {}
  std::uint64_t next() {
    std::uint64_t z = (s += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }
  double uniform() { return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53; }
  double range(double lo, double hi) { return lo + (hi - lo) * uniform(); }
};

// dual feasibility and strong duality for the minimization convention:
// rc_j = c_j - y^T A_j >= 0 on nonbasic-at-lower variables, y <= 0 on Le
// rows, y >= 0 on Ge rows, y^T b == objective
void check_optimality(const Problem& p, const lp::Solution& sol, double tol = 1e-7) {
  REQUIRE(sol.status == Status::Optimal);
  const size_t m = p.rows.size();
  const size_t n = p.objective.size();
  REQUIRE(sol.primal.size() == n);
  REQUIRE(sol.dual.size() == m);

  double ydotb = 0.0;
  for (size_t i = 0; i < m; ++i) {
    if (p.senses[i] == Sense::Le) CHECK(sol.dual[i] <= tol);
    if (p.senses[i] == Sense::Ge) CHECK(sol.dual[i] >= -tol);
    ydotb += sol.dual[i] * p.rhs[i];
  }
  CHECK(ydotb == doctest::Approx(sol.objective).epsilon(1e-6).scale(1.0));

  for (size_t j = 0; j < n; ++j) {
    double rc = p.objective[j];
    for (size_t i = 0; i < m; ++i) rc -= sol.dual[i] * p.rows[i][j];
    bool at_upper = !p.upper.empty() && std::isfinite(p.upper[j]) &&
                    std::abs(sol.primal[j] - p.upper[j]) <= 1e-7;
    if (!at_upper) CHECK(rc >= -tol);
  }

  // primal feasibility
  for (size_t i = 0; i < m; ++i) {
    double ax = 0.0;
    for (size_t j = 0; j < n; ++j) ax += p.rows[i][j] * sol.primal[j];
    if (p.senses[i] == Sense::Eq) CHECK(std::abs(ax - p.rhs[i]) <= 1e-7);
    if (p.senses[i] == Sense::Le) CHECK(ax <= p.rhs[i] + 1e-7);
    if (p.senses[i] == Sense::Ge) CHECK(ax >= p.rhs[i] - 1e-7);
  }
}

}  // namespace

TEST_CASE("two-variable minimum on a half-plane") {
  Problem p;
  p.objective = {1.0, 1.0};
  p.add_row({1.0, 1.0}, Sense::Ge, 1.0);
  auto sol = lp::solve(p);
  CHECK(sol.objective == doctest::Approx(1.0));
  check_optimality(p, sol);
}

TEST_CASE("equality system with a unique solution") {
  Problem p;
  p.objective = {3.0, -1.0, 0.0};
  p.add_row({1.0, 1.0, 0.0}, Sense::Eq, 2.0);
  p.add_row({0.0, 1.0, 1.0}, Sense::Eq, 3.0);
  auto sol = lp::solve(p);
  // x2 as large as possible: x = (0, 2, 1)
  CHECK(sol.objective == doctest::Approx(-2.0));
  CHECK(sol.primal[1] == doctest::Approx(2.0));
  check_optimality(p, sol);
}

TEST_CASE("upper bounds clip the optimum") {
  Problem p;
  p.objective = {-1.0, -2.0};
  p.upper = {1.5, 2.0};
  p.lower = {0.0, 0.0};
  p.add_row({1.0, 1.0}, Sense::Le, 3.0);
  auto sol = lp::solve(p);
  CHECK(sol.status == Status::Optimal);
  // x2 first (cheaper), then x1 up to the row: x = (1, 2)
  CHECK(sol.objective == doctest::Approx(-5.0));
  CHECK(sol.primal[0] == doctest::Approx(1.0));
  CHECK(sol.primal[1] == doctest::Approx(2.0));
}

TEST_CASE("unbounded below is reported") {
  Problem p;
  p.objective = {-1.0, 0.0};
  p.add_row({0.0, 1.0}, Sense::Le, 1.0);
  auto sol = lp::solve(p);
  CHECK(sol.status == Status::Unbounded);
}

TEST_CASE("infeasible system yields a Farkas certificate") {
  Problem p;
  p.objective = {0.0, 0.0};
  p.add_row({1.0, 1.0}, Sense::Le, 1.0);
  p.add_row({1.0, 1.0}, Sense::Ge, 2.0);
  auto sol = lp::solve(p);
  REQUIRE(sol.status == Status::Infeasible);
  REQUIRE(sol.farkas.size() == 2);
  // y^T A >= 0 columnwise and y^T b < 0 over x >= 0
  for (size_t j = 0; j < 2; ++j) {
    double col = sol.farkas[0] * p.rows[0][j] + sol.farkas[1] * p.rows[1][j];
    CHECK(col >= -1e-9);
  }
  CHECK(sol.farkas[0] * p.rhs[0] + sol.farkas[1] * p.rhs[1] < -1e-9);
}

TEST_CASE("random feasible equality programs satisfy duality") {
  Rng rng(42);
  for (int trial = 0; trial < 60; ++trial) {
    int m = 2 + static_cast<int>(rng.next() % 4);
    int n = m + 1 + static_cast<int>(rng.next() % 5);
    Problem p;
    p.objective.resize(n);
    for (auto& c : p.objective) c = rng.range(-1.0, 2.0);
    std::vector<double> x0(n);
    for (auto& x : x0) x = rng.uniform() < 0.4 ? 0.0 : rng.range(0.0, 3.0);
    for (int i = 0; i < m; ++i) {
      std::vector<double> row(n);
      for (auto& a : row) a = rng.range(-2.0, 2.0);
      double b = 0.0;
      for (int j = 0; j < n; ++j) b += row[j] * x0[j];
      p.add_row(row, Sense::Eq, b);
    }
    auto sol = lp::solve(p);
    if (sol.status == Status::Unbounded) continue;
    REQUIRE(sol.status == Status::Optimal);
    double obj0 = 0.0;
    for (int j = 0; j < n; ++j) obj0 += p.objective[j] * x0[j];
    CHECK(sol.objective <= obj0 + 1e-7);
    check_optimality(p, sol);
  }
}

TEST_CASE("random mixed-sense programs satisfy duality") {
  Rng rng(7);
  for (int trial = 0; trial < 60; ++trial) {
    int m = 2 + static_cast<int>(rng.next() % 4);
    int n = 2 + static_cast<int>(rng.next() % 5);
    Problem p;
    p.objective.resize(n);
    for (auto& c : p.objective) c = rng.range(0.1, 2.0);  // bounded below on x >= 0
    std::vector<double> x0(n);
    for (auto& x : x0) x = rng.range(0.0, 2.0);
    for (int i = 0; i < m; ++i) {
      std::vector<double> row(n);
      for (auto& a : row) a = rng.range(-2.0, 2.0);
      double b = 0.0;
      for (int j = 0; j < n; ++j) b += row[j] * x0[j];
      int s = static_cast<int>(rng.next() % 3);
      if (s == 0) p.add_row(row, Sense::Eq, b);
      if (s == 1) p.add_row(row, Sense::Le, b + rng.range(0.0, 0.5));
      if (s == 2) p.add_row(row, Sense::Ge, b - rng.range(0.0, 0.5));
    }
    auto sol = lp::solve(p);
    REQUIRE(sol.status == Status::Optimal);
    check_optimality(p, sol);
  }
}

TEST_CASE("degenerate pivoting terminates") {
  // classic cycling instance for the largest-coefficient rule
  Problem p;
  p.objective = {-0.75, 150.0, -0.02, 6.0};
  p.add_row({0.25, -60.0, -0.04, 9.0}, Sense::Le, 0.0);
  p.add_row({0.5, -90.0, -0.02, 3.0}, Sense::Le, 0.0);
  p.add_row({0.0, 0.0, 1.0, 0.0}, Sense::Le, 1.0);
  auto sol = lp::solve(p);
  REQUIRE(sol.status == Status::Optimal);
  CHECK(sol.objective == doctest::Approx(-0.05));
  check_optimality(p, sol);
}

TEST_CASE("warm start from a previous basis reproduces the optimum") {
  Rng rng(99);
  Problem p;
  int n = 8, m = 4;
  p.objective.resize(n);
  for (auto& c : p.objective) c = rng.range(0.1, 1.0);
  std::vector<double> x0(n);
  for (auto& x : x0) x = rng.range(0.0, 1.0);
  for (int i = 0; i < m; ++i) {
    std::vector<double> row(n);
    for (auto& a : row) a = rng.range(-1.0, 1.0);
    double b = 0.0;
    for (int j = 0; j < n; ++j) b += row[j] * x0[j];
    p.add_row(row, Sense::Eq, b);
  }
  auto cold = lp::solve(p);
  REQUIRE(cold.status == Status::Optimal);

  p.objective[0] += 0.05;  // same shape, perturbed costs
  auto cold2 = lp::solve(p);
  lp::Options opt;
  opt.warm_basis = &cold.basis;
  auto warm = lp::solve(p, opt);
  REQUIRE(warm.status == Status::Optimal);
  CHECK(warm.objective == doctest::Approx(cold2.objective).epsilon(1e-9));
}

TEST_CASE("feasibility interface returns points or rays") {
  std::vector<std::vector<double>> rows = {{1.0, 1.0}, {1.0, -1.0}};
  std::vector<lp::Sense> senses = {Sense::Eq, Sense::Eq};
  auto feas = lp::solve_feasibility(rows, senses, {1.0, 0.0});
  REQUIRE(feas.feasible);
  CHECK(feas.point[0] == doctest::Approx(0.5));
  CHECK(feas.point[1] == doctest::Approx(0.5));

  // x1 + x2 = -1 has no nonnegative solution
  auto bad = lp::solve_feasibility({{1.0, 1.0}}, {Sense::Eq}, {-1.0});
  REQUIRE_FALSE(bad.feasible);
  REQUIRE(bad.ray.size() == 1);
  CHECK(bad.ray[0] * 1.0 >= -1e-9);
  CHECK(bad.ray[0] * -1.0 < 0.0);
}
