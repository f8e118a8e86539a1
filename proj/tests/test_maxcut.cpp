#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "doctest.h"
#include "tdm/errors.hpp"
#include "tdm/matrix.hpp"
#include "tdm/maxcut.hpp"

using namespace tdm;

namespace {

struct Rng {
  std::uint64_t s;
  explicit Rng(std::uint64_t seed) : s(seed) {}
  std::uint64_t next() {
    std::uint64_t z = (s += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }
  double range(double lo, double hi) {
    double u = (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53;
    return lo + (hi - lo) * u;
  }
};

std::vector<double> random_dual(Rng& rng, int d) {
  std::vector<double> y(static_cast<size_t>(moment_length(d)));
  for (auto& v : y) v = rng.range(-1.0, 1.0);
  return y;
}

double column_inner(const std::vector<double>& y, const BinaryVertex& v) {
  auto col = vertex_column(v);
  double s = 0.0;
  for (size_t i = 0; i < col.size(); ++i) s += y[i] * col[i];
  return s;
}

}  // namespace

TEST_CASE("oracle verdict equals the direct column minimum") {
  Rng rng(2024);
  for (int d = 3; d <= 8; ++d) {
    for (int trial = 0; trial < 200; ++trial) {
      auto y = random_dual(rng, d);
      auto res = separation_oracle(y, d);

      double direct = std::numeric_limits<double>::infinity();
      for (const auto& v : ordered_vertices(d)) direct = std::min(direct, column_inner(y, v));
      CHECK(res.slack == doctest::Approx(direct).epsilon(1e-9).scale(1.0));
      CHECK(res.feasible == (direct >= -kTol));
      if (!res.feasible) {
        REQUIRE(res.violating.has_value());
        CHECK(column_inner(y, *res.violating) < -kTol);
        CHECK(column_inner(y, *res.violating) == doctest::Approx(direct).epsilon(1e-9).scale(1.0));
      }
    }
  }
}

TEST_CASE("cut weight equals the naive edge sweep") {
  Rng rng(5);
  const int d = 5;
  auto y = random_dual(rng, d);
  CutGraph g = build_cut_graph(y, d);
  REQUIRE(static_cast<int>(g.star.size()) == d);
  REQUIRE(static_cast<int>(g.pairs.size()) == d * (d - 1) / 2);
  REQUIRE(static_cast<int>(g.terminal.size()) == d + 1);

  // naive: iterate all edges, add weight when endpoints are split
  auto naive = [&](std::uint64_t side_mask) {
    // bit v set = node v on the source side; terminal always opposite
    auto on = [&](int node) { return (side_mask >> node) & 1ull; };
    double w = 0.0;
    for (int i = 1; i <= d; ++i)
      if (on(0) != on(i)) w += g.star[static_cast<size_t>(i - 1)];
    for (int i = 1; i <= d; ++i)
      for (int j = i + 1; j <= d; ++j)
        if (on(i) != on(j)) w += g.pair_weight(i, j);
    for (int v = 0; v <= d; ++v)
      if (on(v)) w += g.terminal[static_cast<size_t>(v)];
    return w;
  };

  for (std::uint64_t mask = 0; mask < (1ull << d); ++mask) {
    std::uint64_t side = 1 | (mask << 1);  // node 0 always with the source
    std::vector<int> s = {0};
    for (int i = 1; i <= d; ++i)
      if ((side >> i) & 1ull) s.push_back(i);
    CHECK(cut_weight(g, s) == doctest::Approx(naive(side)).epsilon(1e-12).scale(1.0));
  }
}

TEST_CASE("cut weights encode column inner products") {
  // cut(S u {0}) = -2 (y^T a_v - y_1) for the vertex v picked out by S
  Rng rng(17);
  const int d = 6;
  auto y = random_dual(rng, d);
  CutGraph g = build_cut_graph(y, d);
  for (std::uint64_t mask = 0; mask < (1ull << d); ++mask) {
    std::vector<int> s = {0};
    for (int i = 0; i < d; ++i)
      if ((mask >> i) & 1ull) s.push_back(i + 1);
    double rhs = -2.0 * (column_inner(y, BinaryVertex(d, mask)) - y[0]);
    CHECK(cut_weight(g, s) == doctest::Approx(rhs).epsilon(1e-9).scale(1.0));
  }
}

TEST_CASE("feasible duals produce no violating vertex") {
  // y = e_0 prices every column at exactly 1
  for (int d = 3; d <= 6; ++d) {
    std::vector<double> y(static_cast<size_t>(moment_length(d)), 0.0);
    y[0] = 1.0;
    auto res = separation_oracle(y, d);
    CHECK(res.feasible);
    CHECK_FALSE(res.violating.has_value());
    CHECK(res.slack == doctest::Approx(1.0));
  }
}

TEST_CASE("oracle respects the dimension cap") {
  std::vector<double> y(static_cast<size_t>(moment_length(17)), 0.0);
  CHECK_THROWS_AS((void)separation_oracle(y, 17), Error);
}

TEST_CASE("edge list export names the terminal") {
  std::vector<double> y(static_cast<size_t>(moment_length(3)), 0.25);
  CutGraph g = build_cut_graph(y, 3);
  std::string s = export_edge_list(g);
  CHECK(s.find("inf") != std::string::npos);
  size_t lines = 0;
  for (char c : s)
    if (c == '\n') ++lines;
  // star (3) + pairs (3) + terminal (4)
  CHECK(lines == 10);
}
