#pragma once

#include <array>
#include <vector>

#include "tdm/matrix.hpp"
#include "tdm/membership.hpp"

namespace tdm {

// Constant-diagonal family: diagonal alpha, off-diagonal beta (Bcm scale);
// the Tdm-scale family has unit diagonal and constant off-diagonal.
struct EquiParams {
  double alpha = 0.0;
  double beta = 0.0;
  int d = 2;
};

// Symmetric Toeplitz with unit diagonal; alphas[k-1] sits on the k-th
// off-diagonal, so dimension is alphas.size() + 1.
struct ToeplitzParams {
  std::vector<double> alphas;

  int dim() const { return static_cast<int>(alphas.size()) + 1; }
};

// Block matrix: within-block constants alpha (size d1) and beta (size d2),
// constant cross-block gamma, unit diagonal.
struct TwoSectorParams {
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 0.0;
  int d1 = 1;
  int d2 = 1;
};

// Diagonal betas[i] with couplings alphas[i] in the last row and column.
struct CrossParams {
  std::vector<double> betas;
  std::vector<double> alphas;  // betas.size() - 1 entries

  int dim() const { return static_cast<int>(betas.size()); }
};

// (2 alpha d - floor(alpha d) - 1) floor(alpha d) / (d (d-1)); the least
// feasible constant pair probability at diagonal value alpha.
double equi_beta_lower(double alpha, int d);

// (alpha^2 d - alpha) / (d - 1); exceeds equi_beta_lower by
// eps(1-eps)/(d(d-1)) where eps is the fractional part of alpha d.
double equi_variance_bound(double alpha, int d);

bool equi_bcm_member(const EquiParams& p);
bool equi_tdm_member(double beta, int d);
CandidateMatrix equi_bcm_matrix(const EquiParams& p);
CandidateMatrix equi_tdm_matrix(double beta, int d);

// Sufficient condition: alpha_{d-1} >= 0 and, with alpha_0 = 1, the
// successive differences are non-increasing and nonnegative.
bool toeplitz_sufficient(const ToeplitzParams& p);

// Interval construction realizing a Toeplitz matrix that satisfies the
// sufficient condition: atom weights whose induced moments equal the scaled
// matrix's moment vector.
AtomVector toeplitz_witness(const ToeplitzParams& p);
CandidateMatrix toeplitz_matrix(const ToeplitzParams& p);

// Exact membership for banded Toeplitz (alpha_k = 0 past the band m) via
// the reduced system over the (d-m+1) 2^m vertices with support spread <= m.
MembershipVerdict m_dependence_check(const ToeplitzParams& p, int m);

// Banded Toeplitz with exactly two nonzero off-diagonals (alpha, beta);
// closed-form membership per dimension, stable for d >= 6.
bool two_dependence_member(double alpha, double beta, int d);
AtomVector two_dependence_witness(double alpha, double beta, int d);
CandidateMatrix two_dependence_matrix(double alpha, double beta, int d);

bool cross_bcm_member(const CrossParams& p);
bool cross_tdm_member(const std::vector<double>& alphas);
CandidateMatrix cross_bcm_matrix(const CrossParams& p);
CandidateMatrix cross_tdm_matrix(const std::vector<double>& alphas);

// Largest feasible cross-block constant: d times the optimum of the
// two-sector moment program. Pass a basis token to warm-start neighboring
// (alpha, beta) evaluations; it is overwritten with the new basis.
double two_sector_gamma_upper(double alpha, double beta, int d1, int d2,
                              std::vector<int>* warm_basis = nullptr);
bool two_sector_member(const TwoSectorParams& p);
CandidateMatrix two_sector_matrix(const TwoSectorParams& p);

// ca*alpha + cb*beta + cg*gamma + c0 >= 0
struct FacetInequality {
  double ca = 0.0;
  double cb = 0.0;
  double cg = 0.0;
  double c0 = 0.0;

  bool holds(double alpha, double beta, double gamma, double tol = kTol) const {
    return ca * alpha + cb * beta + cg * gamma + c0 >= -tol;
  }
};

// Reference polytope descriptions for (d1,d2) in
// {(1,2), (2,2), (3,3), (2,4), (4,4)}; alpha plays no role for d1 = 1.
std::vector<FacetInequality> known_facets(int d1, int d2);
std::vector<std::array<double, 3>> known_vertices(int d1, int d2);

}  // namespace tdm
