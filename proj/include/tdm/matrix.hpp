#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tdm/errors.hpp"

namespace tdm {

// Global comparison tolerance for membership verdicts and feasibility checks.
inline constexpr double kTol = 1e-9;

enum class Mode { Tdm, Bcm };

// Point of {0,1}^d. Bit i of `bits` holds coordinate i (0-based), so the
// first coordinate is the least significant bit.
struct BinaryVertex {
  int d = 0;
  std::uint64_t bits = 0;

  BinaryVertex() = default;
  BinaryVertex(int dim, std::uint64_t mask);

  bool bit(int i) const { return (bits >> i) & 1u; }
  int popcount() const;

  static BinaryVertex zero(int dim) { return BinaryVertex(dim, 0); }
  static BinaryVertex ones(int dim);
  static BinaryVertex singleton(int dim, int i);
  static BinaryVertex from_string(const std::string& s);  // "0110..."

  std::string to_string() const;
};

// Vertex order: popcount ascending, ties by packed value ascending. This is
// the reverse-lexicographic tie-break on coordinate tuples.
bool operator<(const BinaryVertex& a, const BinaryVertex& b);
bool operator==(const BinaryVertex& a, const BinaryVertex& b);
inline bool operator!=(const BinaryVertex& a, const BinaryVertex& b) { return !(a == b); }

// Symmetric d x d candidate, row-major storage. Construction does not
// validate; see validate().
struct CandidateMatrix {
  int d = 0;
  std::vector<double> entries;

  CandidateMatrix() = default;
  explicit CandidateMatrix(int dim) : d(dim), entries(static_cast<size_t>(dim) * dim, 0.0) {}

  double& at(int i, int j) { return entries[static_cast<size_t>(i) * d + j]; }
  double at(int i, int j) const { return entries[static_cast<size_t>(i) * d + j]; }

  static CandidateMatrix from_rows(const std::vector<std::vector<double>>& rows);
};

// Rank-one 0/1 matrix v v^T.
CandidateMatrix outer(const BinaryVertex& v);

struct Violation {
  Errc code;
  std::string detail;
};

struct ValidationResult;

// Symmetric matrix that passed mode-specific structural checks. Tdm mode:
// unit diagonal, entries in [0,1]. Bcm mode: entries in [0,1] and every
// off-diagonal entry bounded by both incident diagonal entries.
class ValidatedMatrix {
 public:
  const CandidateMatrix& matrix() const { return m_; }
  Mode mode() const { return mode_; }
  int dim() const { return m_.d; }
  double at(int i, int j) const { return m_.at(i, j); }

 private:
  friend ValidationResult validate(const CandidateMatrix&, Mode, double);
  ValidatedMatrix(CandidateMatrix m, Mode mode) : m_(std::move(m)), mode_(mode) {}
  CandidateMatrix m_;
  Mode mode_;
};

struct ValidationResult {
  std::optional<ValidatedMatrix> value;
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
};

ValidationResult validate(const CandidateMatrix& m, Mode mode, double tol = kTol);
ValidatedMatrix validate_or_throw(const CandidateMatrix& m, Mode mode, double tol = kTol);

// Length of the moment vector: 1 + d + d(d-1)/2.
int moment_length(int d);

// Index of the pair entry (i,j), 0 <= i < j < d, within a moment vector:
// pairs follow the constant and the d diagonal entries in lexicographic order.
int pair_index(int d, int i, int j);

// (1, b_11, ..., b_dd, b_12, b_13, ..., b_{d-1,d})
struct MomentVector {
  int d = 0;
  std::vector<double> values;
};

MomentVector moment_vector(const CandidateMatrix& m);
MomentVector moment_vector(const ValidatedMatrix& m);

// Moment vector of v v^T: (1, v_1..v_d, v_1 v_2, ..., v_{d-1} v_d).
std::vector<double> vertex_column(const BinaryVertex& v);

// All 2^d vertices in vertex order. d <= 22.
std::vector<BinaryVertex> ordered_vertices(int d);

// Columns of the membership system, one per vertex of {0,1}^d in vertex
// order. Columns are generated on demand; dense() materializes for small d.
class CoefficientMatrix {
 public:
  explicit CoefficientMatrix(int d, int cap = 22);

  int dim() const { return d_; }
  int rows() const { return moment_length(d_); }
  std::uint64_t cols() const { return std::uint64_t(1) << d_; }
  const BinaryVertex& vertex(std::uint64_t j) const { return order_[j]; }
  std::vector<double> column(std::uint64_t j) const { return vertex_column(order_[j]); }
  std::vector<std::vector<double>> dense() const;  // rows() x cols(), d <= 14

 private:
  int d_;
  std::vector<BinaryVertex> order_;
};

// Scales a Tdm-mode matrix by 1/d; the result is Bcm-mode valid.
ValidatedMatrix tdm_to_bcm(const ValidatedMatrix& t);

// Finitely supported probability vector on {0,1}^d.
struct AtomVector {
  int d = 0;
  std::map<BinaryVertex, double> weights;

  double total() const;
  // Sum of weight * vertex_column(v): the moment vector this vector induces.
  MomentVector induced_moments() const;
  // Sum of weight * v v^T.
  CandidateMatrix induced_matrix() const;
};

}  // namespace tdm
