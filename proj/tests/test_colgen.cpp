#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "tdm/colgen.hpp"
#include "tdm/errors.hpp"
#include "tdm/matrix.hpp"
#include "tdm/membership.hpp"
#include "tdm/stochastic.hpp"

using namespace tdm;

namespace {

struct Rng {
  std::uint64_t state;
  explicit Rng(std::uint64_t seed) : state(seed) {}
  std::uint64_t next() {
    state += 0x9E3779B97F4A7C15ull;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }
  double uniform() { return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53; }
  double range(double lo, double hi) { return lo + (hi - lo) * uniform(); }
};

PricingMatrix random_pricing(Rng& rng, int d, double scale) {
  PricingMatrix g;
  g.d = d;
  g.g.assign(static_cast<size_t>(d) * d, 0.0);
  for (int i = 0; i < d; ++i)
    for (int j = i; j < d; ++j) {
      const double v = rng.range(-scale, scale);
      g.g[static_cast<size_t>(i) * d + j] = v;
      g.g[static_cast<size_t>(j) * d + i] = v;
    }
  g.offset = rng.range(-scale, scale);
  return g;
}

double naive_quadratic(const PricingMatrix& g, std::uint64_t mask) {
  double s = 0.0;
  for (int i = 0; i < g.d; ++i) {
    if (!(mask >> i & 1ull)) continue;
    for (int j = 0; j < g.d; ++j)
      if (mask >> j & 1ull) s += g.at(i, j);
  }
  return s;
}

std::pair<std::uint64_t, double> naive_max(const PricingMatrix& g) {
  std::uint64_t best_mask = 0;
  double best = naive_quadratic(g, 0);
  for (std::uint64_t mask = 1; mask < (1ull << g.d); ++mask) {
    const double v = naive_quadratic(g, mask);
    if (v > best) {
      best = v;
      best_mask = mask;
    }
  }
  return {best_mask, best};
}

// largest eigenvalue oracle: power iteration on G + shift I
double power_eigen_max(const PricingMatrix& g) {
  const int d = g.d;
  double maxabs = 0.0;
  for (double v : g.g) maxabs = std::max(maxabs, std::abs(v));
  const double shift = maxabs * d + 1.0;
  std::vector<double> x(static_cast<size_t>(d), 1.0 / std::sqrt(static_cast<double>(d)));
  std::vector<double> y(static_cast<size_t>(d));
  double rayleigh = 0.0;
  for (int it = 0; it < 20000; ++it) {
    for (int i = 0; i < d; ++i) {
      double s = shift * x[static_cast<size_t>(i)];
      for (int j = 0; j < d; ++j) s += g.at(i, j) * x[static_cast<size_t>(j)];
      y[static_cast<size_t>(i)] = s;
    }
    double norm = 0.0;
    for (double v : y) norm += v * v;
    norm = std::sqrt(norm);
    for (int i = 0; i < d; ++i) x[static_cast<size_t>(i)] = y[static_cast<size_t>(i)] / norm;
    rayleigh = norm;
  }
  return rayleigh - shift;
}

double column_inner(const std::vector<double>& y, const BinaryVertex& v) {
  const auto col = vertex_column(v);
  double s = 0.0;
  for (size_t i = 0; i < col.size(); ++i) s += y[i] * col[i];
  return s;
}

void check_ray(const std::vector<double>& y, const MomentVector& p) {
  const int d = p.d;
  double maxabs = 0.0;
  for (double v : y) maxabs = std::max(maxabs, std::abs(v));
  CHECK(maxabs == doctest::Approx(1.0).epsilon(1e-12));
  for (std::uint64_t mask = 0; mask < (1ull << d); ++mask)
    CHECK(column_inner(y, BinaryVertex(d, mask)) >= -1e-7);
  double py = 0.0;
  for (size_t i = 0; i < y.size(); ++i) py += p.values[i] * y[i];
  CHECK(py < 0.0);
}

CandidateMatrix scaled_counterexample() {
  const double c = 2.0 / 3.0;
  return CandidateMatrix::from_rows({{1.0, c, 0.0}, {c, 1.0, c}, {0.0, c, 1.0}});
}

}  // namespace

TEST_CASE("exact pricing matches exhaustive search") {
  Rng rng(101);
  for (int d = 2; d <= 10; ++d)
    for (int rep = 0; rep < 20; ++rep) {
      auto g = random_pricing(rng, d, 1.0 + rep * 0.25);
      auto [vertex, value] = pricing_exact(g);
      auto [best_mask, best] = naive_max(g);
      CHECK(value == doctest::Approx(best).epsilon(1e-12).scale(1.0));
      CHECK(naive_quadratic(g, vertex.bits) == doctest::Approx(value).epsilon(1e-12).scale(1.0));
      (void)best_mask;
    }
  CHECK_THROWS_AS((void)pricing_exact(random_pricing(rng, 26, 1.0)), Error);
}

TEST_CASE("largest eigenvalue agrees with power iteration") {
  PricingMatrix diag;
  diag.d = 3;
  diag.g = {2.0, 0.0, 0.0, 0.0, -1.0, 0.0, 0.0, 0.0, 0.5};
  CHECK(eigen_max_symmetric(diag) == doctest::Approx(2.0).epsilon(1e-8));

  PricingMatrix two;
  two.d = 2;
  two.g = {1.0, 2.0, 2.0, 1.0};
  CHECK(eigen_max_symmetric(two) == doctest::Approx(3.0).epsilon(1e-8));

  Rng rng(7);
  for (int d = 2; d <= 8; ++d)
    for (int rep = 0; rep < 5; ++rep) {
      auto g = random_pricing(rng, d, 2.0);
      const double jac = eigen_max_symmetric(g);
      const double pow = power_eigen_max(g);
      CHECK(jac == doctest::Approx(pow).epsilon(1e-6).scale(1.0));
    }
}

TEST_CASE("relaxed pricing reports the exact value of its vertex") {
  Rng rng(23);
  for (int d = 2; d <= 12; ++d)
    for (int rep = 0; rep < 10; ++rep) {
      auto g = random_pricing(rng, d, 1.5);
      auto [vertex, value] = pricing_qp_relaxed(g, 1e-8, 200);
      CHECK(naive_quadratic(g, vertex.bits) == doctest::Approx(value).epsilon(1e-12).scale(1.0));
      if (d <= 10) {
        auto [best_mask, best] = naive_max(g);
        CHECK(value <= best + 1e-12);
        (void)best_mask;
      }
    }
}

TEST_CASE("pricing matrix reproduces dual inner products on every column") {
  Rng rng(55);
  const int d = 5;
  std::vector<double> u(static_cast<size_t>(moment_length(d)));
  for (auto& v : u) v = rng.range(-2.0, 2.0);
  auto g = assemble_pricing_matrix(d, u);
  for (std::uint64_t mask = 0; mask < (1ull << d); ++mask) {
    const BinaryVertex v{d, mask};
    const double lhs = naive_quadratic(g, mask) + g.offset;
    CHECK(lhs == doctest::Approx(column_inner(u, v)).epsilon(1e-12).scale(1.0));
  }
}

TEST_CASE("initial vertex set covers low-order patterns without duplicates") {
  auto s4 = initial_vertex_set(4);
  CHECK(s4.size() == 12);
  std::vector<std::uint64_t> bits;
  for (const auto& v : s4) bits.push_back(v.bits);
  std::sort(bits.begin(), bits.end());
  CHECK(std::adjacent_find(bits.begin(), bits.end()) == bits.end());
  CHECK(std::binary_search(bits.begin(), bits.end(), 0ull));
  CHECK(std::binary_search(bits.begin(), bits.end(), 15ull));
  for (int i = 0; i < 4; ++i) CHECK(std::binary_search(bits.begin(), bits.end(), 1ull << i));
  CHECK(initial_vertex_set(1).size() == 2);
  CHECK(initial_vertex_set(2).size() == 4);
}

TEST_CASE("all-ones tail matrix is accepted far beyond the exact pricing cap") {
  const int d = 30;
  std::vector<std::vector<double>> rows(static_cast<size_t>(d),
                                        std::vector<double>(static_cast<size_t>(d), 1.0));
  auto vm = tdm_to_bcm(validate_or_throw(CandidateMatrix::from_rows(rows), Mode::Tdm));
  auto r = check_membership_colgen(vm);
  REQUIRE(r.verdict.has_value());
  CHECK(r.verdict->member);
  CHECK(r.distance <= 1e-9);
  REQUIRE(r.verdict->certificate.has_value());
  CHECK(verify_certificate(vm, *r.verdict->certificate).ok);
}

TEST_CASE("mixture instances are members with tiny distance") {
  for (int d = 8; d <= 10; ++d) {
    auto inst = gen_class3(d, 400 + d);
    auto vm = validate_or_throw(inst.matrix, Mode::Bcm);
    auto r = check_membership_colgen(vm);
    REQUIRE(r.verdict.has_value());
    CHECK(r.verdict->member);
    CHECK(r.distance <= 1e-7);
    auto full = check_bcm_full(vm);
    CHECK(full.member == r.verdict->member);
    REQUIRE(r.verdict->certificate.has_value());
    auto report = verify_certificate(vm, *r.verdict->certificate);
    CHECK(report.ok);
    CHECK(report.residual <= 1e-7);
  }
}

TEST_CASE("infeasible instance yields a ray that matches full enumeration") {
  auto vm = tdm_to_bcm(validate_or_throw(scaled_counterexample(), Mode::Tdm));
  auto full = check_bcm_full(vm);
  REQUIRE_FALSE(full.member);

  for (auto mode : {PricingMode::Hybrid, PricingMode::ExactBQP}) {
    ColgenConfig cfg;
    cfg.pricing = mode;
    auto r = check_membership_colgen(vm, cfg);
    REQUIRE(r.verdict.has_value());
    CHECK_FALSE(r.verdict->member);
    CHECK(r.distance > 1e-7);
    REQUIRE(r.verdict->farkas_ray.has_value());
    check_ray(*r.verdict->farkas_ray, moment_vector(vm));
  }
}

TEST_CASE("hybrid and exact pricing reach identical verdicts") {
  for (int seed : {11, 12, 13}) {
    auto inst = gen_class3(9, seed);
    auto vm = validate_or_throw(inst.matrix, Mode::Bcm);
    ColgenConfig hybrid, exact;
    hybrid.pricing = PricingMode::Hybrid;
    exact.pricing = PricingMode::ExactBQP;
    auto rh = check_membership_colgen(vm, hybrid);
    auto re = check_membership_colgen(vm, exact);
    REQUIRE(rh.verdict.has_value());
    REQUIRE(re.verdict.has_value());
    CHECK(rh.verdict->member == re.verdict->member);
    CHECK(std::abs(rh.distance - re.distance) <= 1e-7);
  }
}

TEST_CASE("exact pricing mode refuses dimensions past its sweep cap") {
  const int d = 30;
  std::vector<std::vector<double>> rows(static_cast<size_t>(d),
                                        std::vector<double>(static_cast<size_t>(d), 0.0));
  for (int i = 0; i < d; ++i) rows[static_cast<size_t>(i)][static_cast<size_t>(i)] = 1.0;
  auto vm = tdm_to_bcm(validate_or_throw(CandidateMatrix::from_rows(rows), Mode::Tdm));
  ColgenConfig cfg;
  cfg.pricing = PricingMode::ExactBQP;
  CHECK_THROWS_AS((void)check_membership_colgen(vm, cfg), Error);
}

TEST_CASE("iteration limit returns a sound bracket instead of a verdict") {
  auto inst = gen_class3(8, 900);
  auto vm = validate_or_throw(inst.matrix, Mode::Bcm);
  ColgenConfig cfg;
  cfg.max_iterations = 1;
  auto r = check_membership_colgen(vm, cfg);
  if (r.converged) {
    REQUIRE(r.verdict.has_value());
  } else {
    CHECK_FALSE(r.verdict.has_value());
    CHECK(r.lower_bound >= -1e-12);
    CHECK(r.lower_bound <= r.upper_bound + 1e-12);
    CHECK(r.upper_bound > 0.0);
  }
}

TEST_CASE("dual bound folds the worst reduced cost into the objective") {
  CHECK(dual_bound(0.5, -0.2) == doctest::Approx(0.3));
  CHECK(dual_bound(0.5, 0.1) == doctest::Approx(0.5));
  CHECK(dual_bound(0.0, -1.0) == doctest::Approx(-1.0));
}

TEST_CASE("stats serialization carries the run counters") {
  auto vm = tdm_to_bcm(validate_or_throw(scaled_counterexample(), Mode::Tdm));
  auto r = check_membership_colgen(vm);
  auto j = nlohmann::json::parse(r.stats_json());
  CHECK(j["iterations"].get<int>() == r.iterations);
  CHECK(j["distance"].get<double>() == doctest::Approx(r.distance));
  CHECK(j.contains("pricing_calls_exact"));
  CHECK(j.contains("pricing_calls_relaxed"));
  CHECK(j.contains("pricing_time_fraction"));
}
