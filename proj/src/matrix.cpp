#include "tdm/matrix.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <sstream>

namespace tdm {

BinaryVertex::BinaryVertex(int dim, std::uint64_t mask) : d(dim), bits(mask) {
  if (dim < 0 || dim > 63) fail(Errc::BadShape, "vertex dimension out of range");
  if (dim < 63 && (mask >> dim) != 0) fail(Errc::BadShape, "vertex mask exceeds dimension");
}

int BinaryVertex::popcount() const { return std::popcount(bits); }

BinaryVertex BinaryVertex::ones(int dim) {
  std::uint64_t m = (dim >= 63) ? ~std::uint64_t(0) : ((std::uint64_t(1) << dim) - 1);
  return BinaryVertex(dim, m);
}

BinaryVertex BinaryVertex::singleton(int dim, int i) {
  if (i < 0 || i >= dim) fail(Errc::BadShape, "singleton index out of range");
  return BinaryVertex(dim, std::uint64_t(1) << i);
}

BinaryVertex BinaryVertex::from_string(const std::string& s) {
  if (s.empty() || s.size() > 63) fail(Errc::BadShape, "vertex string length");
  std::uint64_t m = 0;
  for (size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '1')
      m |= std::uint64_t(1) << i;
    else if (s[i] != '0')
      fail(Errc::ParseError, "vertex string must be over {0,1}");
  }
  return BinaryVertex(static_cast<int>(s.size()), m);
}

std::string BinaryVertex::to_string() const {
  std::string s(static_cast<size_t>(d), '0');
  for (int i = 0; i < d; ++i)
    if (bit(i)) s[static_cast<size_t>(i)] = '1';
  return s;
}

bool operator<(const BinaryVertex& a, const BinaryVertex& b) {
  int pa = a.popcount(), pb = b.popcount();
  if (pa != pb) return pa < pb;
  return a.bits < b.bits;
}

bool operator==(const BinaryVertex& a, const BinaryVertex& b) {
  return a.d == b.d && a.bits == b.bits;
}

CandidateMatrix CandidateMatrix::from_rows(const std::vector<std::vector<double>>& rows) {
  CandidateMatrix m(static_cast<int>(rows.size()));
  for (int i = 0; i < m.d; ++i) {
    if (static_cast<int>(rows[i].size()) != m.d) fail(Errc::BadShape, "matrix is not square");
    for (int j = 0; j < m.d; ++j) m.at(i, j) = rows[i][j];
  }
  return m;
}

CandidateMatrix outer(const BinaryVertex& v) {
  CandidateMatrix m(v.d);
  for (int i = 0; i < v.d; ++i)
    if (v.bit(i))
      for (int j = 0; j < v.d; ++j)
        if (v.bit(j)) m.at(i, j) = 1.0;
  return m;
}

ValidationResult validate(const CandidateMatrix& m, Mode mode, double tol) {
  ValidationResult r;
  auto add = [&r](Errc code, std::string detail) { r.violations.push_back({code, std::move(detail)}); };

  if (m.d <= 0 || m.entries.size() != static_cast<size_t>(m.d) * m.d) {
    add(Errc::BadShape, "entries do not form a d x d matrix");
    return r;
  }
  for (double x : m.entries)
    if (!std::isfinite(x)) {
      add(Errc::NotFinite, "matrix contains a non-finite entry");
      return r;
    }

  auto cell = [](int i, int j) {
    std::ostringstream os;
    os << "(" << i + 1 << "," << j + 1 << ")";
    return os.str();
  };

  for (int i = 0; i < m.d; ++i)
    for (int j = i + 1; j < m.d; ++j)
      if (m.at(i, j) != m.at(j, i)) {
        add(Errc::NonSymmetric, "entry " + cell(i, j) + " differs from " + cell(j, i));
        goto symmetry_done;
      }
symmetry_done:

  for (int i = 0; i < m.d; ++i)
    for (int j = 0; j < m.d; ++j) {
      double x = m.at(i, j);
      if (x < -tol || x > 1.0 + tol) {
        add(Errc::EntryOutOfRange, "entry " + cell(i, j) + " outside [0,1]");
        goto range_done;
      }
    }
range_done:

  if (mode == Mode::Tdm) {
    for (int i = 0; i < m.d; ++i)
      if (std::abs(m.at(i, i) - 1.0) > tol) {
        add(Errc::DiagonalNotOne, "diagonal entry " + cell(i, i) + " is not 1");
        break;
      }
  } else {
    for (int i = 0; i < m.d; ++i)
      for (int j = 0; j < m.d; ++j)
        if (i != j && m.at(i, j) > std::min(m.at(i, i), m.at(j, j)) + tol) {
          add(Errc::PairExceedsMarginal,
              "entry " + cell(i, j) + " exceeds an incident diagonal entry");
          goto pair_done;
        }
  pair_done:;
  }

  if (r.violations.empty()) r.value = ValidatedMatrix(m, mode);
  return r;
}

ValidatedMatrix validate_or_throw(const CandidateMatrix& m, Mode mode, double tol) {
  ValidationResult r = validate(m, mode, tol);
  if (!r.ok()) fail(r.violations.front().code, r.violations.front().detail);
  return *r.value;
}

int moment_length(int d) { return 1 + d + d * (d - 1) / 2; }

int pair_index(int d, int i, int j) {
  // pairs (0,1), (0,2), ..., (0,d-1), (1,2), ...; block for row i starts
  // after i*(2d-i-1)/2 earlier pairs.
  return 1 + d + i * (2 * d - i - 1) / 2 + (j - i - 1);
}

MomentVector moment_vector(const CandidateMatrix& m) {
  MomentVector p;
  p.d = m.d;
  p.values.assign(static_cast<size_t>(moment_length(m.d)), 0.0);
  p.values[0] = 1.0;
  for (int i = 0; i < m.d; ++i) p.values[static_cast<size_t>(1 + i)] = m.at(i, i);
  for (int i = 0; i < m.d; ++i)
    for (int j = i + 1; j < m.d; ++j)
      p.values[static_cast<size_t>(pair_index(m.d, i, j))] = m.at(i, j);
  return p;
}

MomentVector moment_vector(const ValidatedMatrix& m) { return moment_vector(m.matrix()); }

std::vector<double> vertex_column(const BinaryVertex& v) {
  std::vector<double> col(static_cast<size_t>(moment_length(v.d)), 0.0);
  col[0] = 1.0;
  for (int i = 0; i < v.d; ++i)
    if (v.bit(i)) col[static_cast<size_t>(1 + i)] = 1.0;
  for (int i = 0; i < v.d; ++i)
    if (v.bit(i))
      for (int j = i + 1; j < v.d; ++j)
        if (v.bit(j)) col[static_cast<size_t>(pair_index(v.d, i, j))] = 1.0;
  return col;
}

std::vector<BinaryVertex> ordered_vertices(int d) {
  if (d < 1 || d > 22) fail(Errc::DimensionTooLarge, "vertex enumeration supports d <= 22");
  std::vector<BinaryVertex> out;
  out.reserve(std::uint64_t(1) << d);
  out.emplace_back(d, 0);
  for (int k = 1; k <= d; ++k) {
    // masks of popcount k in ascending value (Gosper's hack)
    std::uint64_t m = (std::uint64_t(1) << k) - 1;
    std::uint64_t limit = std::uint64_t(1) << d;
    while (m < limit) {
      out.emplace_back(d, m);
      std::uint64_t c = m & -m;
      std::uint64_t r = m + c;
      if (r >= limit) break;
      m = (((r ^ m) >> 2) / c) | r;
    }
  }
  return out;
}

CoefficientMatrix::CoefficientMatrix(int d, int cap) : d_(d) {
  if (d < 1) fail(Errc::BadShape, "dimension must be positive");
  if (d > cap || d > 22)
    fail(Errc::DimensionTooLarge, "coefficient matrix enumeration capped at d = " +
                                      std::to_string(std::min(cap, 22)));
  order_ = ordered_vertices(d);
}

std::vector<std::vector<double>> CoefficientMatrix::dense() const {
  if (d_ > 14) fail(Errc::DimensionTooLarge, "dense materialization supports d <= 14");
  std::vector<std::vector<double>> a(static_cast<size_t>(rows()),
                                     std::vector<double>(static_cast<size_t>(cols()), 0.0));
  for (std::uint64_t j = 0; j < cols(); ++j) {
    std::vector<double> col = column(j);
    for (int i = 0; i < rows(); ++i) a[static_cast<size_t>(i)][j] = col[static_cast<size_t>(i)];
  }
  return a;
}

ValidatedMatrix tdm_to_bcm(const ValidatedMatrix& t) {
  if (t.mode() != Mode::Tdm) fail(Errc::PreconditionFailed, "tdm_to_bcm expects a Tdm-mode matrix");
  CandidateMatrix b = t.matrix();
  for (double& x : b.entries) x /= t.dim();
  return validate_or_throw(b, Mode::Bcm);
}

double AtomVector::total() const {
  double s = 0.0;
  for (const auto& [v, w] : weights) s += w;
  return s;
}

MomentVector AtomVector::induced_moments() const {
  MomentVector p;
  p.d = d;
  p.values.assign(static_cast<size_t>(moment_length(d)), 0.0);
  for (const auto& [v, w] : weights) {
    std::vector<double> col = vertex_column(v);
    for (size_t i = 0; i < col.size(); ++i) p.values[i] += w * col[i];
  }
  return p;
}

CandidateMatrix AtomVector::induced_matrix() const {
  CandidateMatrix m(d);
  for (const auto& [v, w] : weights)
    for (int i = 0; i < d; ++i)
      if (v.bit(i))
        for (int j = 0; j < d; ++j)
          if (v.bit(j)) m.at(i, j) += w;
  return m;
}

}  // namespace tdm
