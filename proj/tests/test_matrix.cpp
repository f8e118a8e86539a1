#include <cmath>
#include <vector>

#include "doctest.h"
#include "tdm/errors.hpp"
#include "tdm/matrix.hpp"

using namespace tdm;

TEST_CASE("vertex order sorts by popcount then packed value") {
  auto vs = ordered_vertices(3);
  REQUIRE(vs.size() == 8);
  std::vector<std::uint64_t> expected = {0b000, 0b001, 0b010, 0b100, 0b011, 0b101, 0b110, 0b111};
  for (size_t k = 0; k < vs.size(); ++k) CHECK(vs[k].bits == expected[k]);
  for (size_t k = 1; k < vs.size(); ++k) CHECK(vs[k - 1] < vs[k]);
}

TEST_CASE("binary vertex accessors") {
  BinaryVertex v(5, 0b10110);
  CHECK(v.popcount() == 3);
  CHECK_FALSE(v.bit(0));
  CHECK(v.bit(1));
  CHECK(v.bit(4));
  CHECK(BinaryVertex::from_string("01101").bits == v.bits);
  CHECK(v.to_string() == "01101");
  CHECK(BinaryVertex::zero(4).bits == 0);
  CHECK(BinaryVertex::ones(4).bits == 0b1111);
  CHECK(BinaryVertex::singleton(4, 2).bits == 0b100);
}

TEST_CASE("coefficient matrix at d=3 matches the hand enumeration") {
  // columns in vertex order 000,100,010,001,110,101,011,111 (coordinate 1 first)
  const double want[7][8] = {
      {1, 1, 1, 1, 1, 1, 1, 1},  // mass
      {0, 1, 0, 0, 1, 1, 0, 1},  // xi_1
      {0, 0, 1, 0, 1, 0, 1, 1},  // xi_2
      {0, 0, 0, 1, 0, 1, 1, 1},  // xi_3
      {0, 0, 0, 0, 1, 0, 0, 1},  // xi_1 xi_2
      {0, 0, 0, 0, 0, 1, 0, 1},  // xi_1 xi_3
      {0, 0, 0, 0, 0, 0, 1, 1},  // xi_2 xi_3
  };
  CoefficientMatrix c(3);
  REQUIRE(c.rows() == 7);
  REQUIRE(c.cols() == 8);
  auto dense = c.dense();
  for (int i = 0; i < 7; ++i)
    for (int j = 0; j < 8; ++j) CHECK(dense[i][j] == want[i][j]);
  for (int j = 0; j < 8; ++j) {
    auto col = c.column(j);
    for (int i = 0; i < 7; ++i) CHECK(col[i] == want[i][j]);
  }
}

TEST_CASE("pair_index walks the upper triangle in order") {
  for (int d = 2; d <= 12; ++d) {
    CHECK(moment_length(d) == 1 + d + d * (d - 1) / 2);
    int k = 1 + d;
    for (int i = 0; i < d; ++i)
      for (int j = i + 1; j < d; ++j) CHECK(pair_index(d, i, j) == k++);
    CHECK(k == moment_length(d));
  }
}

TEST_CASE("vertex_column equals the moment vector of the outer product") {
  for (const auto& v : ordered_vertices(4)) {
    auto col = vertex_column(v);
    auto mv = moment_vector(outer(v));
    REQUIRE(col.size() == mv.values.size());
    for (size_t i = 0; i < col.size(); ++i) CHECK(col[i] == mv.values[i]);
  }
}

TEST_CASE("tdm validation catches structural failures") {
  CandidateMatrix bad_diag = CandidateMatrix::from_rows({{0.9, 0.2}, {0.2, 1.0}});
  auto r1 = validate(bad_diag, Mode::Tdm);
  REQUIRE_FALSE(r1.ok());
  CHECK(r1.violations[0].code == Errc::DiagonalNotOne);

  CandidateMatrix asym = CandidateMatrix::from_rows({{1.0, 0.2}, {0.3, 1.0}});
  auto r2 = validate(asym, Mode::Tdm);
  REQUIRE_FALSE(r2.ok());
  CHECK(r2.violations[0].code == Errc::NonSymmetric);

  CandidateMatrix out_of_range = CandidateMatrix::from_rows({{1.0, 1.2}, {1.2, 1.0}});
  CHECK_FALSE(validate(out_of_range, Mode::Tdm).ok());

  CandidateMatrix nan_entry = CandidateMatrix::from_rows({{1.0, std::nan("")}, {std::nan(""), 1.0}});
  auto r3 = validate(nan_entry, Mode::Tdm);
  REQUIRE_FALSE(r3.ok());
  CHECK(r3.violations[0].code == Errc::NotFinite);

  CandidateMatrix good = CandidateMatrix::from_rows({{1.0, 0.4}, {0.4, 1.0}});
  auto r4 = validate(good, Mode::Tdm);
  REQUIRE(r4.ok());
  CHECK(r4.value->dim() == 2);
  CHECK(r4.value->mode() == Mode::Tdm);
}

TEST_CASE("bcm validation bounds pairs by incident marginals") {
  CandidateMatrix m = CandidateMatrix::from_rows({{0.5, 0.6}, {0.6, 0.7}});
  auto r = validate(m, Mode::Bcm);
  REQUIRE_FALSE(r.ok());
  CHECK(r.violations[0].code == Errc::PairExceedsMarginal);

  CandidateMatrix ok = CandidateMatrix::from_rows({{0.5, 0.3}, {0.3, 0.7}});
  CHECK(validate(ok, Mode::Bcm).ok());
}

TEST_CASE("tdm_to_bcm scales every entry by 1/d") {
  CandidateMatrix t = CandidateMatrix::from_rows(
      {{1.0, 0.5, 0.2}, {0.5, 1.0, 0.4}, {0.2, 0.4, 1.0}});
  ValidatedMatrix vt = validate_or_throw(t, Mode::Tdm);
  ValidatedMatrix b = tdm_to_bcm(vt);
  CHECK(b.mode() == Mode::Bcm);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) CHECK(b.at(i, j) == doctest::Approx(t.at(i, j) / 3).epsilon(1e-15));
}

TEST_CASE("moment vector layout") {
  CandidateMatrix m = CandidateMatrix::from_rows(
      {{0.3, 0.1, 0.2}, {0.1, 0.4, 0.25}, {0.2, 0.25, 0.5}});
  auto mv = moment_vector(m);
  REQUIRE(static_cast<int>(mv.values.size()) == moment_length(3));
  CHECK(mv.values[0] == 1.0);
  CHECK(mv.values[1] == 0.3);
  CHECK(mv.values[2] == 0.4);
  CHECK(mv.values[3] == 0.5);
  CHECK(mv.values[4] == 0.1);
  CHECK(mv.values[5] == 0.2);
  CHECK(mv.values[6] == 0.25);
}

TEST_CASE("atom vector induces consistent moments and matrix") {
  AtomVector atoms;
  atoms.d = 3;
  atoms.weights[BinaryVertex(3, 0b000)] = 0.25;
  atoms.weights[BinaryVertex(3, 0b011)] = 0.5;
  atoms.weights[BinaryVertex(3, 0b111)] = 0.25;
  CHECK(atoms.total() == doctest::Approx(1.0));

  auto mv = atoms.induced_moments();
  auto rec = moment_vector(atoms.induced_matrix());
  REQUIRE(mv.values.size() == rec.values.size());
  for (size_t i = 0; i < mv.values.size(); ++i)
    CHECK(mv.values[i] == doctest::Approx(rec.values[i]).epsilon(1e-15));
  // marginals: coordinate 1 appears in 011 and 111
  CHECK(mv.values[1] == doctest::Approx(0.75));
  CHECK(mv.values[4] == doctest::Approx(0.75));  // pair (1,2)
  CHECK(mv.values[5] == doctest::Approx(0.25));  // pair (1,3)
}

TEST_CASE("enumeration caps guard dimension") {
  CHECK_THROWS_AS((void)ordered_vertices(23), Error);
  CHECK_THROWS_AS(CoefficientMatrix(23), Error);
}
