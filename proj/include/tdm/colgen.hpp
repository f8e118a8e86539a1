#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tdm/matrix.hpp"
#include "tdm/membership.hpp"

namespace tdm {

enum class PricingMode { ExactBQP, QPRelaxed, Hybrid };

struct ColgenConfig {
  PricingMode pricing = PricingMode::Hybrid;
  double epsilon = 1e-8;  // spectral shift added to lambda_max
  int max_iterations = 2000;
  int qp_steps = 200;     // projected-gradient budget per relaxed call
  int exact_period = 10;  // Hybrid: exact pricing every k-th iteration
  bool early_exit = true;
  int exact_cap = 25;  // exhaustive sweep dimension cap
  double tol = kTol;
};

// Quadratic form such that v^T G v + offset equals the negated reduced cost
// of vertex v's master column.
struct PricingMatrix {
  int d = 0;
  std::vector<double> g;  // row-major d*d, symmetric
  double offset = 0.0;

  double at(int i, int j) const { return g[static_cast<size_t>(i) * d + static_cast<size_t>(j)]; }
};

struct ColgenResult {
  double distance = 0.0;     // master objective at exit (an upper bound)
  double lower_bound = 0.0;  // best dual bound seen
  double upper_bound = 0.0;
  bool converged = false;  // false after hitting the iteration limit
  std::optional<MembershipVerdict> verdict;
  int iterations = 0;
  int pricing_calls_exact = 0;
  int pricing_calls_relaxed = 0;
  double pricing_time_fraction = 0.0;

  std::string stats_json() const;
};

// Zero vertex, all singletons, all pairs, and the all-ones vertex,
// deduplicated: at most d(d+1)/2 + 2 vertices.
std::vector<BinaryVertex> initial_vertex_set(int d);
std::vector<BinaryVertex> initial_vertex_set(const ValidatedMatrix& b);

// Folds moment-space dual prices u (mass, marginals, pairs) into the pricing
// form: G_ii = u_{1+i}, G_ij = u_pair(i,j)/2, offset = u_0, so that
// v^T G v + offset = u^T a_v for every vertex column a_v.
PricingMatrix assemble_pricing_matrix(int d, const std::vector<double>& moment_duals);

// Global maximum of v^T G v over {0,1}^d by a Gray-code sweep.
std::pair<BinaryVertex, double> pricing_exact(const PricingMatrix& g, int cap = 25);

// Concave surrogate p^T (G - fI) p + f 1^T p over [0,1]^d with
// f = lambda_max + epsilon, maximized by projected gradient ascent and
// rounded coordinatewise (ties to 1). Returns the rounded vertex and its
// exact quadratic value, a lower bound on the true maximum.
std::pair<BinaryVertex, double> pricing_qp_relaxed(const PricingMatrix& g, double epsilon,
                                                   int steps);

// Largest eigenvalue by cyclic Jacobi rotations, accurate to
// 1e-8 * (1 + max entry magnitude).
double eigen_max_symmetric(const PricingMatrix& g);

// Lower bound on the max-norm distance: the convexity row caps column mass
// at 1, so one unit of the worst reduced cost is all a new column can gain.
double dual_bound(double master_objective, double min_reduced_cost);

// Max-norm distance minimization over a growing vertex set. Member verdicts
// carry a certificate extracted over the final set; non-member verdicts
// carry a Farkas ray. Hitting the iteration limit leaves verdict empty with
// the bracket [lower_bound, upper_bound].
ColgenResult check_membership_colgen(const ValidatedMatrix& b, const ColgenConfig& cfg = {});

}  // namespace tdm
