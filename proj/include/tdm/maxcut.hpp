#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tdm/matrix.hpp"

namespace tdm {

// Weighted graph encoding the dual-cone feasibility test as a max-cut
// instance: complete graph on nodes {0,1,...,d} plus a terminal node. Node 0
// carries the constant row, node i the i-th coordinate, edge (i,j) the pair
// row. Each node v of the complete part hangs on the terminal by an edge of
// weight z_v = -(sum of the complete-part edges at v).
struct CutGraph {
  int d = 0;
  double y1 = 0.0;              // dual value of the constant row
  std::vector<double> star;     // (0,i), i = 1..d
  std::vector<double> pairs;    // (i,j), 1 <= i < j <= d, lexicographic
  std::vector<double> terminal; // (v, terminal), v = 0..d

  int terminal_node() const { return d + 1; }
  double pair_weight(int i, int j) const;  // 1-based, i < j
};

// y has moment_length(d) entries in moment order.
CutGraph build_cut_graph(const std::vector<double>& y, int d);

// s lists node ids from {0,...,d}; must contain 0 and no duplicates. The
// terminal node is implicitly on the other side.
double cut_weight(const CutGraph& g, const std::vector<int>& s);

struct SeparationResult {
  bool feasible = false;
  std::optional<BinaryVertex> violating;  // vertex column with y-inner-product < -tol
  double slack = 0.0;                     // minimum column inner product
};

// Decides y^T column >= 0 for all vertex columns by sweeping the 2^d cuts
// that keep node 0 with the source side; feasible iff the maximum cut stays
// within 2*y1.
SeparationResult separation_oracle(const std::vector<double>& y, int d, double tol = kTol,
                                   int cap = 16);

// Edge list, one "u v weight" line per edge; the terminal renders as "inf".
std::string export_edge_list(const CutGraph& g);

}  // namespace tdm
