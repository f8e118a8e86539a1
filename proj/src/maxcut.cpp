#include "tdm/maxcut.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <sstream>

namespace tdm {

double CutGraph::pair_weight(int i, int j) const {
  // pairs (1,2), (1,3), ..., (d-1,d); block for i starts after
  // (i-1)(2d-i)/2 earlier pairs
  int idx = (i - 1) * (2 * d - i) / 2 + (j - i - 1);
  return pairs[static_cast<size_t>(idx)];
}

CutGraph build_cut_graph(const std::vector<double>& y, int d) {
  if (static_cast<int>(y.size()) != moment_length(d))
    fail(Errc::WrongLength, "dual vector must have d(d+1)/2 + 1 entries");
  CutGraph g;
  g.d = d;
  g.y1 = y[0];
  g.star.assign(y.begin() + 1, y.begin() + 1 + d);
  g.pairs.assign(y.begin() + 1 + d, y.end());
  g.terminal.assign(static_cast<size_t>(d + 1), 0.0);
  // z_v over the complete part only
  double z0 = 0.0;
  for (double w : g.star) z0 += w;
  g.terminal[0] = -z0;
  for (int i = 1; i <= d; ++i) {
    double s = g.star[static_cast<size_t>(i - 1)];
    for (int j = 1; j <= d; ++j) {
      if (j == i) continue;
      s += g.pair_weight(std::min(i, j), std::max(i, j));
    }
    g.terminal[static_cast<size_t>(i)] = -s;
  }
  return g;
}

double cut_weight(const CutGraph& g, const std::vector<int>& s) {
  std::vector<char> side(static_cast<size_t>(g.d + 1), 0);
  bool has_zero = false;
  for (int v : s) {
    if (v < 0 || v > g.d) fail(Errc::InvalidSubset, "node id out of range");
    if (side[static_cast<size_t>(v)]) fail(Errc::InvalidSubset, "duplicate node id");
    side[static_cast<size_t>(v)] = 1;
    if (v == 0) has_zero = true;
  }
  if (!has_zero) fail(Errc::InvalidSubset, "subset must contain node 0");

  double w = 0.0;
  for (int i = 1; i <= g.d; ++i)
    if (side[0] != side[static_cast<size_t>(i)]) w += g.star[static_cast<size_t>(i - 1)];
  for (int i = 1; i <= g.d; ++i)
    for (int j = i + 1; j <= g.d; ++j)
      if (side[static_cast<size_t>(i)] != side[static_cast<size_t>(j)]) w += g.pair_weight(i, j);
  for (int v = 0; v <= g.d; ++v)
    if (side[static_cast<size_t>(v)]) w += g.terminal[static_cast<size_t>(v)];
  return w;
}

SeparationResult separation_oracle(const std::vector<double>& y, int d, double tol, int cap) {
  if (d > cap)
    fail(Errc::DimensionTooLarge, "cut sweep capped at d = " + std::to_string(cap));
  CutGraph g = build_cut_graph(y, d);

  // Cut value for S = {0} + support(mask), written through the identity
  // cut(S) = -2 * (sum of complete-part edges inside S). Tracking the inside
  // sum incrementally over a Gray-code sweep costs O(d) per step.
  double inside = 0.0;  // star/pair weight buried inside the current S
  std::uint64_t mask = 0;
  double best_inner = g.y1;  // S = {0}: column of the zero vertex
  std::uint64_t best_mask = 0;
  std::uint64_t total = std::uint64_t(1) << d;
  for (std::uint64_t k = 1; k < total; ++k) {
    int bit = std::countr_zero(k);  // Gray code flips this coordinate
    std::uint64_t flipped = std::uint64_t(1) << bit;
    double delta = g.star[static_cast<size_t>(bit)];
    for (int i = 0; i < d; ++i)
      if (i != bit && (mask >> i) & 1)
        delta += g.pair_weight(std::min(bit, i) + 1, std::max(bit, i) + 1);
    if (mask & flipped) {
      inside -= delta;
      mask ^= flipped;
    } else {
      inside += delta;
      mask ^= flipped;
    }
    double inner = g.y1 + inside;  // y-inner-product of the column of mask
    if (inner < best_inner) {
      best_inner = inner;
      best_mask = mask;
    }
  }

  SeparationResult r;
  r.slack = best_inner;
  if (best_inner < -tol) {
    r.feasible = false;
    r.violating = BinaryVertex(d, best_mask);
  } else {
    r.feasible = true;
  }
  return r;
}

std::string export_edge_list(const CutGraph& g) {
  std::ostringstream os;
  os.precision(17);
  for (int i = 1; i <= g.d; ++i) os << 0 << " " << i << " " << g.star[static_cast<size_t>(i - 1)] << "\n";
  for (int i = 1; i <= g.d; ++i)
    for (int j = i + 1; j <= g.d; ++j) os << i << " " << j << " " << g.pair_weight(i, j) << "\n";
  for (int v = 0; v <= g.d; ++v) os << v << " inf " << g.terminal[static_cast<size_t>(v)] << "\n";
  return os.str();
}

}  // namespace tdm
