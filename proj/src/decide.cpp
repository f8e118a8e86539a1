#include "tdm/decide.hpp"

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>

#include "tdm/errors.hpp"
#include "tdm/parametric.hpp"
#include "tdm/symmetry.hpp"

namespace tdm {

namespace {

// pattern detection is structural; boundary cases belong to the generic path
constexpr double kPatternTol = 1e-12;

bool near(double a, double b) { return std::abs(a - b) <= kPatternTol; }

std::optional<std::vector<double>> toeplitz_profile(const CandidateMatrix& m) {
  int d = m.d;
  if (d < 2) return std::nullopt;
  std::vector<double> a(static_cast<size_t>(d) - 1);
  for (int k = 1; k < d; ++k) a[static_cast<size_t>(k) - 1] = m.at(0, k);
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j)
      if (!near(m.at(i, j), a[static_cast<size_t>(j - i) - 1])) return std::nullopt;
  return a;
}

// diagonal plus last row and column; everything else zero
bool cross_shape(const CandidateMatrix& m) {
  int d = m.d;
  if (d < 2) return false;
  for (int i = 0; i + 1 < d; ++i)
    for (int j = i + 1; j + 1 < d; ++j)
      if (!near(m.at(i, j), 0.0)) return false;
  return true;
}

std::optional<TwoSectorParams> two_sector_profile(const CandidateMatrix& m) {
  int d = m.d;
  if (d < 2) return std::nullopt;
  for (int d1 = 1; d1 < d; ++d1) {
    TwoSectorParams p;
    p.d1 = d1;
    p.d2 = d - d1;
    p.alpha = d1 >= 2 ? m.at(0, 1) : 0.0;
    p.beta = p.d2 >= 2 ? m.at(d1, d1 + 1) : 0.0;
    p.gamma = m.at(0, d1);
    bool ok = true;
    for (int i = 0; i < d && ok; ++i)
      for (int j = i + 1; j < d && ok; ++j) {
        double want = j < d1 ? p.alpha : (i >= d1 ? p.beta : p.gamma);
        ok = near(m.at(i, j), want);
      }
    if (ok) return p;
  }
  return std::nullopt;
}

AtomVector cross_tdm_atoms(const std::vector<double>& arms) {
  int d = static_cast<int>(arms.size()) + 1;
  double inv = 1.0 / d;
  AtomVector atoms;
  atoms.d = d;
  auto add = [&](std::uint64_t bits, double w) {
    if (w > 0.0) atoms.weights[BinaryVertex(d, bits)] += w;
  };
  const std::uint64_t last = 1ull << (d - 1);
  double sum = 0.0;
  for (int i = 0; i + 1 < d; ++i) {
    sum += arms[static_cast<size_t>(i)];
    add((1ull << i) | last, arms[static_cast<size_t>(i)] * inv);
    add(1ull << i, (1.0 - arms[static_cast<size_t>(i)]) * inv);
  }
  add(last, (1.0 - sum) * inv);
  add(0, sum * inv);
  return atoms;
}

// at most one interior coordinate fires jointly with the last, so the joint
// pair mass cannot exceed the last marginal
std::vector<double> cross_tdm_ray(int d) {
  std::vector<double> y(static_cast<size_t>(moment_length(d)), 0.0);
  y[static_cast<size_t>(d)] = 1.0;  // marginal of coordinate d
  for (int i = 0; i + 1 < d; ++i) {
    y[static_cast<size_t>(pair_index(d, i, d - 1))] = -1.0;
    for (int j = i + 1; j + 1 < d; ++j) y[static_cast<size_t>(pair_index(d, i, j))] = 1.0;
  }
  return y;
}

Decision decided(MembershipVerdict v) {
  Decision dec;
  dec.decided = true;
  dec.verdict = std::move(v);
  return dec;
}

Decision generic_route(const ValidatedMatrix& b, const DecideOptions& opt) {
  int d = b.dim();
  if (d <= 10) {
    PermutationGroup g = automorphism_group(b.matrix());
    if (g.order() > 1 && orbit_count(g) <= 100000) {
      SymmetricOptions so;
      so.tol = opt.tol;
      return decided(check_bcm_symmetric(b, &g, so));
    }
  }
  // dense enumeration memory: moment_length(d) * 2^d doubles
  double bytes = static_cast<double>(moment_length(d)) * std::pow(2.0, d) * 8.0;
  if (d <= 20 && bytes <= 5e8) {
    ExactOptions eo;
    eo.tol = opt.tol;
    return decided(check_bcm_full(b, eo));
  }
  ColgenConfig cfg = opt.colgen;
  cfg.tol = opt.tol;
  ColgenResult res = check_membership_colgen(b, cfg);
  if (res.verdict) return decided(*res.verdict);
  Decision dec;
  dec.decided = false;
  dec.lower_bound = res.lower_bound;
  dec.upper_bound = res.upper_bound;
  return dec;
}

Decision route_tdm_patterns(const ValidatedMatrix& t, const DecideOptions& opt) {
  const CandidateMatrix& m = t.matrix();
  int d = t.dim();

  if (auto prof = toeplitz_profile(m)) {
    ToeplitzParams tp{*prof};
    if (toeplitz_sufficient(tp)) {
      MembershipVerdict v;
      v.member = true;
      v.method = "parametric:toeplitz";
      v.certificate = certificate_from_atoms(toeplitz_witness(tp));
      return decided(std::move(v));
    }
    int band = d - 1;
    while (band > 0 && std::abs((*prof)[static_cast<size_t>(band) - 1]) <= kPatternTol) --band;
    if (band >= 1 && band <= d - 2 &&
        static_cast<double>(d - band + 1) * std::pow(2.0, band) <= 2e5) {
      MembershipVerdict v = m_dependence_check(tp, band);
      v.method = "parametric:m-dependence";
      return decided(std::move(v));
    }
  }

  if (cross_shape(m)) {
    std::vector<double> arms(static_cast<size_t>(d) - 1);
    for (int i = 0; i + 1 < d; ++i) arms[static_cast<size_t>(i)] = m.at(i, d - 1);
    MembershipVerdict v;
    v.method = "parametric:cross";
    v.member = cross_tdm_member(arms);
    if (v.member)
      v.certificate = certificate_from_atoms(cross_tdm_atoms(arms));
    else
      v.farkas_ray = normalized_ray(cross_tdm_ray(d));
    return decided(std::move(v));
  }

  if (auto ts = two_sector_profile(m)) {
    MembershipVerdict v;
    v.method = "parametric:two-sector";
    v.member = two_sector_member(*ts);
    return decided(std::move(v));
  }

  return generic_route(tdm_to_bcm(t), opt);
}

Decision route_bcm_patterns(const ValidatedMatrix& b, const DecideOptions& opt) {
  const CandidateMatrix& m = b.matrix();
  int d = b.dim();

  bool equi = d >= 2;
  for (int i = 0; i < d && equi; ++i) equi = near(m.at(i, i), m.at(0, 0));
  for (int i = 0; i < d && equi; ++i)
    for (int j = i + 1; j < d && equi; ++j) equi = near(m.at(i, j), m.at(0, 1));
  if (equi) {
    MembershipVerdict v;
    v.method = "parametric:equi";
    v.member = equi_bcm_member(EquiParams{m.at(0, 0), m.at(0, 1), d});
    return decided(std::move(v));
  }

  if (cross_shape(m)) {
    CrossParams p;
    for (int i = 0; i < d; ++i) p.betas.push_back(m.at(i, i));
    for (int i = 0; i + 1 < d; ++i) p.alphas.push_back(m.at(i, d - 1));
    MembershipVerdict v;
    v.method = "parametric:cross";
    v.member = cross_bcm_member(p);
    return decided(std::move(v));
  }

  return generic_route(b, opt);
}

}  // namespace

Decision decide_matrix(const CandidateMatrix& m, const DecideOptions& opt) {
  ValidationResult vr = validate(m, opt.mode, opt.tol);
  if (!vr.ok()) {
    Decision dec;
    dec.decided = true;
    dec.verdict.member = false;
    dec.verdict.method = "validation";
    dec.violations = vr.violations;
    return dec;
  }
  const ValidatedMatrix& vm = *vr.value;

  switch (opt.method) {
    case Method::Full: {
      ExactOptions eo;
      eo.tol = opt.tol;
      return decided(check_bcm_full(opt.mode == Mode::Tdm ? tdm_to_bcm(vm) : vm, eo));
    }
    case Method::Symmetric: {
      SymmetricOptions so;
      so.tol = opt.tol;
      return decided(
          check_bcm_symmetric(opt.mode == Mode::Tdm ? tdm_to_bcm(vm) : vm, nullptr, so));
    }
    case Method::Colgen: {
      ColgenConfig cfg = opt.colgen;
      cfg.tol = opt.tol;
      ColgenResult res =
          check_membership_colgen(opt.mode == Mode::Tdm ? tdm_to_bcm(vm) : vm, cfg);
      if (res.verdict) return decided(*res.verdict);
      Decision dec;
      dec.decided = false;
      dec.lower_bound = res.lower_bound;
      dec.upper_bound = res.upper_bound;
      return dec;
    }
    case Method::Auto:
      break;
  }
  return opt.mode == Mode::Tdm ? route_tdm_patterns(vm, opt) : route_bcm_patterns(vm, opt);
}

MembershipVerdict check_tdm(const ValidatedMatrix& t, Method method, const ExactOptions& opt) {
  if (t.mode() != Mode::Tdm) fail(Errc::PreconditionFailed, "check_tdm expects Tdm mode");
  ValidatedMatrix b = tdm_to_bcm(t);
  switch (method) {
    case Method::Full:
      return check_bcm_full(b, opt);
    case Method::Symmetric: {
      SymmetricOptions so;
      so.tol = opt.tol;
      return check_bcm_symmetric(b, nullptr, so);
    }
    case Method::Colgen: {
      ColgenConfig cfg;
      cfg.tol = opt.tol;
      ColgenResult res = check_membership_colgen(b, cfg);
      if (!res.verdict)
        fail(Errc::IterationLimit, "column generation undecided; distance within [" +
                                       std::to_string(res.lower_bound) + ", " +
                                       std::to_string(res.upper_bound) + "]");
      return *res.verdict;
    }
    case Method::Auto:
      break;
  }
  DecideOptions dopt;
  dopt.mode = Mode::Tdm;
  dopt.tol = opt.tol;
  Decision dec = decide_matrix(t.matrix(), dopt);
  if (!dec.decided)
    fail(Errc::IterationLimit, "column generation undecided; distance within [" +
                                   std::to_string(dec.lower_bound) + ", " +
                                   std::to_string(dec.upper_bound) + "]");
  return dec.verdict;
}

}  // namespace tdm
