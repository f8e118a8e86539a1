#pragma once

#include <vector>

#include "tdm/colgen.hpp"
#include "tdm/membership.hpp"

namespace tdm {

struct DecideOptions {
  Method method = Method::Auto;
  Mode mode = Mode::Tdm;
  double tol = kTol;
  ColgenConfig colgen;
};

// decided=false only on the column-generation iteration cap, in which case
// [lower_bound, upper_bound] brackets the distance to the feasible set.
struct Decision {
  bool decided = false;
  MembershipVerdict verdict;
  std::vector<Violation> violations;  // non-empty when validation rejected the input
  double lower_bound = 0.0;
  double upper_bound = 0.0;
};

// Validates, then routes: parametric fast path when the matrix matches a
// known pattern, the orbit reduction when a nontrivial symmetry group is
// found, full enumeration at moderate dimension, column generation beyond.
// Explicit methods skip the pattern scan.
Decision decide_matrix(const CandidateMatrix& m, const DecideOptions& opt = {});

}  // namespace tdm
