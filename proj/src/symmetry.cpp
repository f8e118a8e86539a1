#include "tdm/symmetry.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <optional>
#include <unordered_set>

#include "json.hpp"
#include "tdm/errors.hpp"
#include "tdm/lp.hpp"

namespace tdm {
namespace {

constexpr int kPackLimit = 16;                   // 4 bits per image
constexpr std::uint64_t kClosureCap = 1u << 24;  // explicit closure size cap
constexpr int kSymmetricMaterializeCap = 8;
constexpr int kBurnsideStreamCap = 12;

std::uint64_t factorial(int d) {
  std::uint64_t f = 1;
  for (int i = 2; i <= d; ++i) f *= static_cast<std::uint64_t>(i);
  return f;
}

std::uint64_t pack_perm(const std::uint8_t* p, int d) {
  std::uint64_t key = 0;
  for (int i = 0; i < d; ++i) key |= static_cast<std::uint64_t>(p[i]) << (4 * i);
  return key;
}

void check_perm(int d, const std::vector<int>& p) {
  if (static_cast<int>(p.size()) != d)
    fail(Errc::WrongLength, "permutation length " + std::to_string(p.size()) +
                                " does not match dimension " + std::to_string(d));
  std::vector<char> seen(static_cast<size_t>(d), 0);
  for (int v : p) {
    if (v < 0 || v >= d)
      fail(Errc::ParseError, "permutation image " + std::to_string(v + 1) + " out of range");
    if (seen[static_cast<size_t>(v)])
      fail(Errc::ParseError, "permutation repeats image " + std::to_string(v + 1));
    seen[static_cast<size_t>(v)] = 1;
  }
}

bool is_identity(const std::vector<int>& p) {
  for (int i = 0; i < static_cast<int>(p.size()); ++i)
    if (p[static_cast<size_t>(i)] != i) return false;
  return true;
}

// image of a vertex mask: bit sigma(i) of the result equals bit i of mask
std::uint32_t apply_to_mask(const std::vector<int>& p, std::uint32_t mask) {
  std::uint32_t out = 0;
  for (int i = 0; i < static_cast<int>(p.size()); ++i)
    if (mask >> i & 1u) out |= 1u << p[static_cast<size_t>(i)];
  return out;
}

int cycle_count(const std::uint8_t* p, int d) {
  std::uint32_t visited = 0;
  int cycles = 0;
  for (int i = 0; i < d; ++i) {
    if (visited >> i & 1u) continue;
    ++cycles;
    int j = i;
    while (!(visited >> j & 1u)) {
      visited |= 1u << j;
      j = p[j];
    }
  }
  return cycles;
}

}  // namespace

std::vector<int> PermutationGroup::element(std::uint64_t k) const {
  if (k >= order_) fail(Errc::PreconditionFailed, "element index out of range");
  std::vector<int> p(static_cast<size_t>(d_));
  if (!flat_.empty()) {
    const std::uint8_t* src = flat_.data() + static_cast<size_t>(k) * d_;
    for (int i = 0; i < d_; ++i) p[static_cast<size_t>(i)] = src[i];
    return p;
  }
  if (order_ == 1) {
    for (int i = 0; i < d_; ++i) p[static_cast<size_t>(i)] = i;
    return p;
  }
  fail(Errc::PreconditionFailed, "group is not materialized; stream elements instead");
}

bool PermutationGroup::contains(const std::vector<int>& perm) const {
  check_perm(d_, perm);
  if (full_symmetric_) return true;
  if (order_ == 1) return is_identity(perm);
  for (std::uint64_t k = 0; k < order_; ++k) {
    const std::uint8_t* src = flat_.data() + static_cast<size_t>(k) * d_;
    bool same = true;
    for (int i = 0; i < d_ && same; ++i) same = src[i] == perm[static_cast<size_t>(i)];
    if (same) return true;
  }
  return false;
}

PermutationGroup PermutationGroup::trivial(int d) {
  if (d < 1) fail(Errc::BadShape, "dimension must be positive");
  PermutationGroup g;
  g.d_ = d;
  g.order_ = 1;
  return g;
}

PermutationGroup PermutationGroup::symmetric(int d) {
  if (d < 1) fail(Errc::BadShape, "dimension must be positive");
  if (d > 20) fail(Errc::DimensionTooLarge, "symmetric group order overflows past d = 20");
  PermutationGroup g;
  g.d_ = d;
  g.order_ = factorial(d);
  g.full_symmetric_ = true;
  if (d >= 2) {
    std::vector<int> swap01(static_cast<size_t>(d)), cyc(static_cast<size_t>(d));
    for (int i = 0; i < d; ++i) {
      swap01[static_cast<size_t>(i)] = i;
      cyc[static_cast<size_t>(i)] = (i + 1) % d;
    }
    swap01[0] = 1;
    swap01[1] = 0;
    g.generators_.push_back(swap01);
    if (d > 2) g.generators_.push_back(cyc);
  }
  if (d <= kSymmetricMaterializeCap) {
    g.flat_.reserve(static_cast<size_t>(g.order_) * d);
    std::vector<std::uint8_t> p(static_cast<size_t>(d));
    for (int i = 0; i < d; ++i) p[static_cast<size_t>(i)] = static_cast<std::uint8_t>(i);
    do {
      g.flat_.insert(g.flat_.end(), p.begin(), p.end());
    } while (std::next_permutation(p.begin(), p.end()));
  }
  return g;
}

PermutationGroup PermutationGroup::from_generators(int d,
                                                   const std::vector<std::vector<int>>& gens) {
  if (d < 1) fail(Errc::BadShape, "dimension must be positive");
  for (const auto& p : gens) check_perm(d, p);
  std::vector<std::vector<int>> kept;
  for (const auto& p : gens)
    if (!is_identity(p)) kept.push_back(p);
  if (kept.empty()) return trivial(d);
  if (d > kPackLimit)
    fail(Errc::DimensionTooLarge, "explicit closure supports d <= " + std::to_string(kPackLimit));

  // BFS closure under left multiplication by generators
  std::vector<std::uint8_t> flat;
  std::unordered_set<std::uint64_t> seen;
  std::vector<std::uint8_t> id(static_cast<size_t>(d));
  for (int i = 0; i < d; ++i) id[static_cast<size_t>(i)] = static_cast<std::uint8_t>(i);
  flat.insert(flat.end(), id.begin(), id.end());
  seen.insert(pack_perm(id.data(), d));
  std::uint64_t head = 0;
  std::vector<std::uint8_t> next(static_cast<size_t>(d));
  while (head * d < flat.size()) {
    std::vector<std::uint8_t> cur(flat.begin() + static_cast<long>(head * d),
                                  flat.begin() + static_cast<long>((head + 1) * d));
    ++head;
    for (const auto& gperm : kept) {
      for (int i = 0; i < d; ++i)
        next[static_cast<size_t>(i)] =
            static_cast<std::uint8_t>(gperm[static_cast<size_t>(cur[static_cast<size_t>(i)])]);
      if (seen.insert(pack_perm(next.data(), d)).second) {
        flat.insert(flat.end(), next.begin(), next.end());
        if (flat.size() / static_cast<size_t>(d) > kClosureCap)
          fail(Errc::DimensionTooLarge, "group closure exceeds explicit storage cap");
      }
    }
  }

  if (flat.size() / static_cast<std::uint64_t>(d) == factorial(d)) return symmetric(d);
  PermutationGroup g;
  g.d_ = d;
  g.order_ = flat.size() / static_cast<std::uint64_t>(d);
  g.flat_ = std::move(flat);
  g.generators_ = kept;
  g.verify_axioms();
  return g;
}

PermutationGroup PermutationGroup::from_elements(int d,
                                                 const std::vector<std::vector<int>>& elements) {
  if (d < 1) fail(Errc::BadShape, "dimension must be positive");
  if (elements.empty()) fail(Errc::BadShape, "a group needs at least the identity");
  if (d > kPackLimit)
    fail(Errc::DimensionTooLarge,
         "explicit element lists support d <= " + std::to_string(kPackLimit));
  std::unordered_set<std::uint64_t> seen;
  std::vector<std::uint8_t> flat;
  bool has_identity = false;
  for (const auto& p : elements) {
    check_perm(d, p);
    std::vector<std::uint8_t> row(static_cast<size_t>(d));
    for (int i = 0; i < d; ++i)
      row[static_cast<size_t>(i)] = static_cast<std::uint8_t>(p[static_cast<size_t>(i)]);
    if (!seen.insert(pack_perm(row.data(), d)).second)
      fail(Errc::ParseError, "duplicate element in group list");
    if (is_identity(p)) has_identity = true;
    flat.insert(flat.end(), row.begin(), row.end());
  }
  if (!has_identity) fail(Errc::PreconditionFailed, "element list lacks the identity");

  const std::uint64_t n = flat.size() / static_cast<std::uint64_t>(d);
  // closure under composition; inverses follow for finite closed sets
  std::vector<std::uint8_t> prod(static_cast<size_t>(d));
  for (std::uint64_t a = 0; a < n; ++a) {
    const std::uint8_t* pa = flat.data() + static_cast<size_t>(a) * d;
    for (std::uint64_t b = 0; b < n; ++b) {
      const std::uint8_t* pb = flat.data() + static_cast<size_t>(b) * d;
      for (int i = 0; i < d; ++i) prod[static_cast<size_t>(i)] = pa[pb[i]];
      if (!seen.count(pack_perm(prod.data(), d)))
        fail(Errc::PreconditionFailed, "element list is not closed under composition");
    }
  }
  return from_flat(d, std::move(flat));
}

PermutationGroup PermutationGroup::from_flat(int d, std::vector<std::uint8_t> flat) {
  const std::uint64_t n = flat.size() / static_cast<std::uint64_t>(d);
  if (n == factorial(d)) return symmetric(d);
  PermutationGroup g;
  g.d_ = d;
  g.order_ = n;
  g.flat_ = std::move(flat);
  g.extract_generators();
  return g;
}

void PermutationGroup::extract_generators() {
  generators_.clear();
  if (order_ <= 1) return;
  std::vector<std::uint8_t> id(static_cast<size_t>(d_));
  for (int i = 0; i < d_; ++i) id[static_cast<size_t>(i)] = static_cast<std::uint8_t>(i);
  std::unordered_set<std::uint64_t> closed;
  closed.insert(pack_perm(id.data(), d_));

  auto close_over = [&] {
    closed.clear();
    closed.insert(pack_perm(id.data(), d_));
    std::vector<std::vector<std::uint8_t>> queue{id};
    std::vector<std::uint8_t> nxt(static_cast<size_t>(d_));
    for (size_t h = 0; h < queue.size(); ++h) {
      const auto cur = queue[h];
      for (const auto& gp : generators_) {
        for (int i = 0; i < d_; ++i)
          nxt[static_cast<size_t>(i)] =
              static_cast<std::uint8_t>(gp[static_cast<size_t>(cur[static_cast<size_t>(i)])]);
        if (closed.insert(pack_perm(nxt.data(), d_)).second) queue.push_back(nxt);
      }
    }
  };

  for (std::uint64_t k = 0; k < order_; ++k) {
    const std::uint8_t* p = flat_.data() + static_cast<size_t>(k) * d_;
    if (closed.count(pack_perm(p, d_))) continue;
    std::vector<int> gen(static_cast<size_t>(d_));
    for (int i = 0; i < d_; ++i) gen[static_cast<size_t>(i)] = p[i];
    generators_.push_back(std::move(gen));
    close_over();
    if (closed.size() == order_) break;
  }
}

void PermutationGroup::verify_axioms() const {
  if (flat_.empty()) return;
  std::unordered_set<std::uint64_t> seen;
  for (std::uint64_t k = 0; k < order_; ++k)
    seen.insert(pack_perm(flat_.data() + static_cast<size_t>(k) * d_, d_));
  std::vector<std::uint8_t> id(static_cast<size_t>(d_));
  for (int i = 0; i < d_; ++i) id[static_cast<size_t>(i)] = static_cast<std::uint8_t>(i);
  if (!seen.count(pack_perm(id.data(), d_)))
    fail(Errc::PreconditionFailed, "group lacks the identity");
  // sampled product closure plus a full inverse sweep
  const std::uint64_t pairs = order_ * order_;
  const std::uint64_t stride = pairs <= 4096 ? 1 : pairs / 4096;
  std::vector<std::uint8_t> prod(static_cast<size_t>(d_)), inv(static_cast<size_t>(d_));
  for (std::uint64_t idx = 0; idx < pairs; idx += stride) {
    const std::uint64_t a = idx / order_, b = idx % order_;
    const std::uint8_t* pa = flat_.data() + static_cast<size_t>(a) * d_;
    const std::uint8_t* pb = flat_.data() + static_cast<size_t>(b) * d_;
    for (int i = 0; i < d_; ++i) prod[static_cast<size_t>(i)] = pa[pb[i]];
    if (!seen.count(pack_perm(prod.data(), d_)))
      fail(Errc::PreconditionFailed, "group closure check failed");
  }
  for (std::uint64_t k = 0; k < order_; ++k) {
    const std::uint8_t* p = flat_.data() + static_cast<size_t>(k) * d_;
    for (int i = 0; i < d_; ++i) inv[static_cast<size_t>(p[i])] = static_cast<std::uint8_t>(i);
    if (!seen.count(pack_perm(inv.data(), d_)))
      fail(Errc::PreconditionFailed, "group lacks an inverse");
  }
}

std::string PermutationGroup::to_json() const {
  nlohmann::ordered_json j;
  j["dimension"] = d_;
  j["order"] = order_;
  j["full_symmetric"] = full_symmetric_;
  j["generators"] = nlohmann::ordered_json::array();
  for (const auto& g : generators_) {
    nlohmann::ordered_json row = nlohmann::ordered_json::array();
    for (int v : g) row.push_back(v + 1);  // 1-based on the wire
    j["generators"].push_back(row);
  }
  return j.dump(2);
}

std::uint64_t orbit_count(const PermutationGroup& g) {
  const int d = g.dim();
  if (d > 20) fail(Errc::DimensionTooLarge, "orbit counting supports d <= 20");
  if (!g.materialized() && d > kBurnsideStreamCap)
    fail(Errc::DimensionTooLarge,
         "streaming Burnside enumeration supports d <= " + std::to_string(kBurnsideStreamCap));
  std::uint64_t total = 0;
  g.for_each_element([&](const std::uint8_t* p) { total += 1ull << cycle_count(p, d); });
  return total / g.order();
}

OrbitTable orbit_representatives(const PermutationGroup& g) {
  const int d = g.dim();
  if (d > 20) fail(Errc::DimensionTooLarge, "orbit sweep supports d <= 20");
  const std::uint32_t n = 1u << d;
  OrbitTable table;
  table.orbit_of.assign(n, -1);
  const auto& gens = g.generators();

  const auto verts = ordered_vertices(d);  // sweep in the vertex order
  std::vector<std::uint32_t> stack;
  for (const auto& v : verts) {
    const auto mask = static_cast<std::uint32_t>(v.bits);
    if (table.orbit_of[mask] >= 0) continue;
    const auto orbit_idx = static_cast<std::int32_t>(table.representatives.size());
    table.representatives.push_back(v);
    table.members.emplace_back();
    auto& members = table.members.back();
    table.orbit_of[mask] = orbit_idx;
    stack.assign(1, mask);
    members.push_back(mask);
    while (!stack.empty()) {
      const std::uint32_t cur = stack.back();
      stack.pop_back();
      for (const auto& p : gens) {
        const std::uint32_t img = apply_to_mask(p, cur);
        if (table.orbit_of[img] < 0) {
          table.orbit_of[img] = orbit_idx;
          members.push_back(img);
          stack.push_back(img);
        }
      }
    }
    table.sizes.push_back(members.size());
  }
  return table;
}

PermutationGroup automorphism_group(const CandidateMatrix& m) {
  const int d = m.d;
  if (d < 1) fail(Errc::BadShape, "dimension must be positive");
  if (d > 10)
    fail(Errc::DimensionTooLarge,
         "exhaustive automorphism search supports d <= 10; pass known generators instead");

  // fingerprint: diagonal entry plus sorted off-diagonal row
  std::vector<std::vector<double>> fingerprint(static_cast<size_t>(d));
  for (int i = 0; i < d; ++i) {
    auto& f = fingerprint[static_cast<size_t>(i)];
    f.push_back(m.at(i, i));
    std::vector<double> rest;
    for (int j = 0; j < d; ++j)
      if (j != i) rest.push_back(m.at(i, j));
    std::sort(rest.begin(), rest.end());
    f.insert(f.end(), rest.begin(), rest.end());
  }

  std::vector<std::uint8_t> flat;
  std::vector<int> img(static_cast<size_t>(d), -1);
  std::vector<char> used(static_cast<size_t>(d), 0);

  auto consistent = [&](int i, int p) {
    if (fingerprint[static_cast<size_t>(i)] != fingerprint[static_cast<size_t>(p)]) return false;
    for (int j = 0; j < i; ++j)
      if (m.at(i, j) != m.at(p, img[static_cast<size_t>(j)])) return false;
    return true;
  };

  auto dfs = [&](auto&& self, int i) -> void {
    if (i == d) {
      for (int k = 0; k < d; ++k)
        flat.push_back(static_cast<std::uint8_t>(img[static_cast<size_t>(k)]));
      return;
    }
    for (int p = 0; p < d; ++p) {
      if (used[static_cast<size_t>(p)] || !consistent(i, p)) continue;
      used[static_cast<size_t>(p)] = 1;
      img[static_cast<size_t>(i)] = p;
      self(self, i + 1);
      used[static_cast<size_t>(p)] = 0;
    }
    img[static_cast<size_t>(i)] = -1;
  };
  dfs(dfs, 0);
  return PermutationGroup::from_flat(d, std::move(flat));
}

PermutationGroup automorphism_group(const CandidateMatrix& m,
                                    const std::vector<std::vector<int>>& generators) {
  const int d = m.d;
  for (const auto& p : generators) {
    check_perm(d, p);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j)
        if (m.at(i, j) != m.at(p[static_cast<size_t>(i)], p[static_cast<size_t>(j)]))
          fail(Errc::PreconditionFailed, "generator does not fix the matrix");
  }
  return PermutationGroup::from_generators(d, generators);
}

namespace {

// row index space of the moment system: 0 = mass, 1..d = marginals, then pairs
std::vector<std::vector<int>> moment_row_orbits(const PermutationGroup& g) {
  const int d = g.dim();
  const int m = moment_length(d);
  std::vector<int> orbit_of(static_cast<size_t>(m), -1);
  std::vector<std::vector<int>> orbits;
  const auto& gens = g.generators();

  auto row_image = [&](const std::vector<int>& p, int row) {
    if (row == 0) return 0;
    if (row <= d) return 1 + p[static_cast<size_t>(row - 1)];
    int r = row - 1 - d, i = 0, j = 0;
    for (i = 0; i < d; ++i) {
      const int block = d - 1 - i;
      if (r < block) {
        j = i + 1 + r;
        break;
      }
      r -= block;
    }
    int pi = p[static_cast<size_t>(i)], pj = p[static_cast<size_t>(j)];
    if (pi > pj) std::swap(pi, pj);
    return pair_index(d, pi, pj);
  };

  std::vector<int> stack;
  for (int row = 0; row < m; ++row) {
    if (orbit_of[static_cast<size_t>(row)] >= 0) continue;
    const int idx = static_cast<int>(orbits.size());
    orbits.emplace_back();
    orbit_of[static_cast<size_t>(row)] = idx;
    orbits[static_cast<size_t>(idx)].push_back(row);
    stack.assign(1, row);
    while (!stack.empty()) {
      const int cur = stack.back();
      stack.pop_back();
      for (const auto& p : gens) {
        const int img = row_image(p, cur);
        if (orbit_of[static_cast<size_t>(img)] < 0) {
          orbit_of[static_cast<size_t>(img)] = idx;
          orbits[static_cast<size_t>(idx)].push_back(img);
          stack.push_back(img);
        }
      }
    }
  }
  return orbits;
}

}  // namespace

MembershipVerdict check_bcm_symmetric(const ValidatedMatrix& b, const PermutationGroup* group,
                                      const SymmetricOptions& opt) {
  if (b.mode() != Mode::Bcm)
    fail(Errc::PreconditionFailed, "symmetric membership expects a matrix validated as Bcm");
  const int d = b.dim();
  if (d > opt.sweep_cap)
    fail(Errc::DimensionTooLarge, "orbit sweep supports d <= " + std::to_string(opt.sweep_cap));

  std::optional<PermutationGroup> owned;
  if (!group) owned = automorphism_group(b.matrix());
  const PermutationGroup& g = group ? *group : *owned;
  if (group) {
    if (g.dim() != d) fail(Errc::BadShape, "group dimension does not match the matrix");
    for (const auto& p : g.generators())
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
          if (b.at(i, j) != b.at(p[static_cast<size_t>(i)], p[static_cast<size_t>(j)]))
            fail(Errc::PreconditionFailed, "group generator does not fix the matrix");
  }

  const auto table = orbit_representatives(g);
  const auto p = moment_vector(b).values;
  const int m = static_cast<int>(p.size());
  const auto n_orbits = static_cast<int>(table.count());

  // orbit-summed columns: column k aggregates the vertex columns of orbit k
  std::vector<std::vector<double>> rows(static_cast<size_t>(m),
                                        std::vector<double>(static_cast<size_t>(n_orbits), 0.0));
  for (int k = 0; k < n_orbits; ++k)
    for (const std::uint32_t mask : table.members[static_cast<size_t>(k)]) {
      const auto col = vertex_column(BinaryVertex{d, mask});
      for (int r = 0; r < m; ++r)
        rows[static_cast<size_t>(r)][static_cast<size_t>(k)] += col[static_cast<size_t>(r)];
    }

  lp::Options lpo;
  lpo.feas_tol = opt.tol;
  const auto feas = lp::solve_feasibility(
      rows, std::vector<lp::Sense>(static_cast<size_t>(m), lp::Sense::Eq), p, lpo);

  MembershipVerdict verdict;
  verdict.method = "symmetric";
  if (feas.feasible) {
    verdict.member = true;
    Certificate cert;
    cert.d = d;
    cert.kind = CertificateKind::Expanded;
    for (int k = 0; k < n_orbits; ++k) {
      // reduced columns are orbit sums, so the orbit variable is already the
      // per-member weight
      const double w = feas.point[static_cast<size_t>(k)];
      if (w <= 1e-12) continue;
      for (const std::uint32_t mask : table.members[static_cast<size_t>(k)]) {
        cert.vertices.push_back(BinaryVertex{d, mask});
        cert.weights.push_back(w);
      }
    }
    verdict.certificate = std::move(cert);
    return verdict;
  }

  verdict.member = false;
  // the reduced ray satisfies the summed-column inequalities; averaging over
  // row orbits turns that into a bound each individual column satisfies
  const auto orbits = moment_row_orbits(g);
  std::vector<double> ray(static_cast<size_t>(m), 0.0);
  for (const auto& orbit : orbits) {
    double s = 0.0;
    for (int r : orbit) s += feas.ray[static_cast<size_t>(r)];
    const double avg = s / static_cast<double>(orbit.size());
    for (int r : orbit) ray[static_cast<size_t>(r)] = avg;
  }
  verdict.farkas_ray = normalized_ray(ray);
  return verdict;
}

}  // namespace tdm
