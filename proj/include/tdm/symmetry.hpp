#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include "tdm/matrix.hpp"
#include "tdm/membership.hpp"

namespace tdm {

// Subgroup of the permutations of {1,...,d}. Elements are stored explicitly
// (flat, d bytes per permutation, 0-based images) except for full symmetric
// groups above the materialization threshold, which stream their elements.
// A small generating set is kept alongside for orbit walks.
class PermutationGroup {
 public:
  int dim() const { return d_; }
  std::uint64_t order() const { return order_; }
  bool full_symmetric() const { return full_symmetric_; }
  bool materialized() const { return !flat_.empty() || order_ == 1; }
  const std::vector<std::vector<int>>& generators() const { return generators_; }

  // element access for materialized groups
  std::vector<int> element(std::uint64_t k) const;

  // Applies fn to every element, streaming for implicit full symmetric
  // groups. fn receives the permutation as a span of 0-based images.
  template <typename Fn>
  void for_each_element(Fn&& fn) const;

  bool contains(const std::vector<int>& perm) const;

  static PermutationGroup trivial(int d);
  static PermutationGroup symmetric(int d);
  static PermutationGroup from_generators(int d, const std::vector<std::vector<int>>& gens);
  static PermutationGroup from_elements(int d, const std::vector<std::vector<int>>& elements);

  std::string to_json() const;

 private:
  PermutationGroup() = default;
  static PermutationGroup from_flat(int d, std::vector<std::uint8_t> flat);
  void extract_generators();
  void verify_axioms() const;
  friend PermutationGroup automorphism_group(const CandidateMatrix&);

  int d_ = 0;
  std::uint64_t order_ = 1;
  bool full_symmetric_ = false;
  std::vector<std::uint8_t> flat_;  // order_ * d_ images; empty when implicit
  std::vector<std::vector<int>> generators_;
};

struct OrbitTable {
  std::vector<BinaryVertex> representatives;  // minimum under the vertex order
  std::vector<std::uint64_t> sizes;
  std::vector<std::vector<std::uint32_t>> members;  // masks per orbit
  std::vector<std::int32_t> orbit_of;               // mask -> orbit index

  std::uint64_t count() const { return representatives.size(); }
};

// Burnside count of the orbits of {0,1}^d: (1/|G|) * sum over elements of
// 2^(number of cycles).
std::uint64_t orbit_count(const PermutationGroup& g);

// Sweeps all 2^d vertices, grouping them by generator-BFS. d <= 20.
OrbitTable orbit_representatives(const PermutationGroup& g);

// Exhaustive backtracking search for all permutations fixing M (exact entry
// equality), pruned by sorted-row fingerprints. d <= 10.
PermutationGroup automorphism_group(const CandidateMatrix& m);

// Verifies each generator fixes M, then returns the generated group.
PermutationGroup automorphism_group(const CandidateMatrix& m,
                                    const std::vector<std::vector<int>>& generators);

struct SymmetricOptions {
  int sweep_cap = 20;  // orbit sweep dimension cap
  double tol = kTol;
};

// Membership through the orbit-reduced system: one variable per orbit,
// columns are orbit-summed vertex columns. Group defaults to the
// automorphism group of B. Member verdicts carry the expanded certificate;
// Farkas rays are symmetrized over row orbits so the full-system conditions
// hold componentwise.
MembershipVerdict check_bcm_symmetric(const ValidatedMatrix& b,
                                      const PermutationGroup* group = nullptr,
                                      const SymmetricOptions& opt = {});

template <typename Fn>
void PermutationGroup::for_each_element(Fn&& fn) const {
  if (!flat_.empty()) {
    for (std::uint64_t k = 0; k < order_; ++k)
      fn(flat_.data() + static_cast<size_t>(k) * d_);
    return;
  }
  if (order_ == 1) {  // trivial group without storage
    std::vector<std::uint8_t> id(static_cast<size_t>(d_));
    for (int i = 0; i < d_; ++i) id[static_cast<size_t>(i)] = static_cast<std::uint8_t>(i);
    fn(id.data());
    return;
  }
  // implicit full symmetric group: lexicographic streaming
  std::vector<std::uint8_t> p(static_cast<size_t>(d_));
  for (int i = 0; i < d_; ++i) p[static_cast<size_t>(i)] = static_cast<std::uint8_t>(i);
  do {
    fn(p.data());
  } while (std::next_permutation(p.begin(), p.end()));
}

}  // namespace tdm
