#include "tdm/parametric.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>

#include "tdm/errors.hpp"
#include "tdm/lp.hpp"

namespace tdm {
namespace {

bool in_unit(double x, double tol = kTol) { return x >= -tol && x <= 1.0 + tol; }

// floor with a snap margin so boundary products like (2/3)*3 land on the
// integer they represent
double snapped_floor(double x) { return std::floor(x + 1e-9); }

std::vector<std::vector<double>> pascal(int n) {
  std::vector<std::vector<double>> c(static_cast<size_t>(n) + 1);
  for (int i = 0; i <= n; ++i) {
    c[static_cast<size_t>(i)].assign(static_cast<size_t>(i) + 1, 1.0);
    for (int j = 1; j < i; ++j)
      c[static_cast<size_t>(i)][static_cast<size_t>(j)] =
          c[static_cast<size_t>(i - 1)][static_cast<size_t>(j - 1)] +
          c[static_cast<size_t>(i - 1)][static_cast<size_t>(j)];
  }
  return c;
}

}  // namespace

double equi_beta_lower(double alpha, int d) {
  if (d < 2) fail(Errc::BadShape, "the bound needs d >= 2");
  if (!in_unit(alpha)) fail(Errc::EntryOutOfRange, "alpha must lie in [0,1]");
  alpha = std::clamp(alpha, 0.0, 1.0);
  const double k = snapped_floor(alpha * d);
  return (2.0 * alpha * d - k - 1.0) * k / (d * (d - 1.0));
}

double equi_variance_bound(double alpha, int d) {
  if (d < 2) fail(Errc::BadShape, "the bound needs d >= 2");
  if (!in_unit(alpha)) fail(Errc::EntryOutOfRange, "alpha must lie in [0,1]");
  alpha = std::clamp(alpha, 0.0, 1.0);
  return (alpha * alpha * d - alpha) / (d - 1.0);
}

bool equi_bcm_member(const EquiParams& p) {
  if (p.d < 2) fail(Errc::BadShape, "the constant family needs d >= 2");
  if (!in_unit(p.alpha) || !in_unit(p.beta)) return false;
  if (p.beta > p.alpha + kTol) return false;
  return p.beta >= equi_beta_lower(p.alpha, p.d) - kTol;
}

bool equi_tdm_member(double beta, int d) {
  if (d < 2) fail(Errc::BadShape, "the constant family needs d >= 2");
  return in_unit(beta);
}

CandidateMatrix equi_bcm_matrix(const EquiParams& p) {
  CandidateMatrix m(p.d);
  for (int i = 0; i < p.d; ++i)
    for (int j = 0; j < p.d; ++j) m.at(i, j) = i == j ? p.alpha : p.beta;
  return m;
}

CandidateMatrix equi_tdm_matrix(double beta, int d) {
  return equi_bcm_matrix(EquiParams{1.0, beta, d});
}

bool toeplitz_sufficient(const ToeplitzParams& p) {
  const int d = p.dim();
  if (d < 2) return true;
  for (double a : p.alphas)
    if (!in_unit(a)) return false;
  const auto& a = p.alphas;
  if (a.back() < -kTol) return false;
  double prev = 1.0 - a[0];
  if (prev < -kTol) return false;
  for (size_t k = 1; k < a.size(); ++k) {
    const double diff = a[k - 1] - a[k];
    if (diff > prev + kTol || diff < -kTol) return false;
    prev = diff;
  }
  return true;
}

CandidateMatrix toeplitz_matrix(const ToeplitzParams& p) {
  const int d = p.dim();
  CandidateMatrix m(d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      m.at(i, j) = i == j ? 1.0 : p.alphas[static_cast<size_t>(std::abs(i - j)) - 1];
  return m;
}

AtomVector toeplitz_witness(const ToeplitzParams& p) {
  if (!toeplitz_sufficient(p))
    fail(Errc::PreconditionFailed, "the interval construction needs the sufficient condition");
  const int d = p.dim();
  // a[0] = 1, a[d] = 0 sentinel; delta[k] = a[k-1] - a[k]
  std::vector<double> a(static_cast<size_t>(d) + 1, 0.0);
  a[0] = 1.0;
  for (int k = 1; k < d; ++k) a[static_cast<size_t>(k)] = p.alphas[static_cast<size_t>(k) - 1];
  std::vector<double> delta(static_cast<size_t>(d) + 1, 0.0);
  for (int k = 1; k <= d; ++k)
    delta[static_cast<size_t>(k)] = a[static_cast<size_t>(k) - 1] - a[static_cast<size_t>(k)];

  AtomVector atoms;
  atoms.d = d;
  auto add = [&](std::uint64_t mask, double w) {
    if (w <= 0.0) return;
    atoms.weights[BinaryVertex{d, mask}] += w;
  };

  // cell 1: nested prefixes from the left edge, active sets {1..k}
  for (int k = 1; k <= d; ++k)
    add((k == 64 ? ~0ull : (1ull << k) - 1), delta[static_cast<size_t>(k)] / d);
  // cell j >= 2: prefix lengths delta_1 >= delta_2 >= ..., active sets {j..j+k}
  for (int j = 2; j <= d; ++j) {
    const int top = d - j;
    for (int k = 0; k < top; ++k)
      add(((1ull << (k + 1)) - 1) << (j - 1),
          (delta[static_cast<size_t>(k) + 1] - delta[static_cast<size_t>(k) + 2]) / d);
    add(((1ull << (top + 1)) - 1) << (j - 1), delta[static_cast<size_t>(top) + 1] / d);
    add(0, a[1] / d);  // the part of the cell no event covers
  }
  return atoms;
}

MembershipVerdict m_dependence_check(const ToeplitzParams& p, int m) {
  const int d = p.dim();
  if (m < 0 || m > d - 1) fail(Errc::PreconditionFailed, "band must satisfy 0 <= m <= d-1");
  for (int k = m + 1; k < d; ++k)
    if (std::abs(p.alphas[static_cast<size_t>(k) - 1]) > kTol)
      fail(Errc::PreconditionFailed, "entries beyond the band must be zero");

  const auto t = validate_or_throw(toeplitz_matrix(p), Mode::Tdm);
  const auto b = tdm_to_bcm(t);
  const auto full_p = moment_vector(b).values;
  const int full_rows = static_cast<int>(full_p.size());

  // rows kept: mass, marginals, pairs within the band
  std::vector<int> kept;
  kept.reserve(static_cast<size_t>(1 + d + (2 * d - m) * (m + 1) / 2));
  for (int r = 0; r <= d; ++r) kept.push_back(r);
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d && j - i <= m; ++j) kept.push_back(pair_index(d, i, j));

  // columns: vertices whose support fits in a window of width m+1
  std::vector<BinaryVertex> verts;
  verts.push_back(BinaryVertex::zero(d));
  for (int s = 0; s < d; ++s) {
    const int w = std::min(m, d - 1 - s);
    for (std::uint64_t sub = 0; sub < (1ull << w); ++sub)
      verts.push_back(BinaryVertex{d, (1ull << s) | (sub << (s + 1))});
  }

  const int nr = static_cast<int>(kept.size());
  std::vector<std::vector<double>> rows(static_cast<size_t>(nr),
                                        std::vector<double>(verts.size(), 0.0));
  std::vector<double> rhs(static_cast<size_t>(nr));
  for (int r = 0; r < nr; ++r) rhs[static_cast<size_t>(r)] = full_p[static_cast<size_t>(kept[static_cast<size_t>(r)])];
  for (size_t c = 0; c < verts.size(); ++c) {
    const auto col = vertex_column(verts[c]);
    for (int r = 0; r < nr; ++r)
      rows[static_cast<size_t>(r)][c] = col[static_cast<size_t>(kept[static_cast<size_t>(r)])];
  }

  const auto feas = lp::solve_feasibility(
      rows, std::vector<lp::Sense>(static_cast<size_t>(nr), lp::Sense::Eq), rhs);

  MembershipVerdict verdict;
  verdict.method = "m-dependence";
  if (feas.feasible) {
    verdict.member = true;
    Certificate cert;
    cert.d = d;
    for (size_t c = 0; c < verts.size(); ++c)
      if (feas.point[c] > 1e-12) {
        cert.vertices.push_back(verts[c]);
        cert.weights.push_back(feas.point[c]);
      }
    verdict.certificate = std::move(cert);
    return verdict;
  }

  verdict.member = false;
  // columns outside the band carry pair rows the reduced system dropped;
  // giving those rows the ray's total magnitude keeps every column sum
  // nonnegative while the dropped rows have zero moment
  double mass = 0.0;
  for (double y : feas.ray) mass += std::abs(y);
  std::vector<double> ray(static_cast<size_t>(full_rows), mass);
  for (int r = 0; r < nr; ++r)
    ray[static_cast<size_t>(kept[static_cast<size_t>(r)])] = feas.ray[static_cast<size_t>(r)];
  verdict.farkas_ray = normalized_ray(ray);
  return verdict;
}

bool two_dependence_member(double alpha, double beta, int d) {
  if (d < 3) fail(Errc::UnsupportedDimension, "two-step dependence needs d >= 3");
  if (alpha < -kTol || beta < -kTol) return false;
  if (2.0 * alpha - beta > 1.0 + kTol) return false;
  switch (d) {
    case 3:
      return beta <= 1.0 + kTol;
    case 4:
      return alpha + beta <= 1.0 + kTol;
    case 5:
      return beta <= 0.5 + kTol && alpha + beta <= 1.0 + kTol;
    default:
      return alpha + 4.0 * beta <= 2.0 + kTol;
  }
}

CandidateMatrix two_dependence_matrix(double alpha, double beta, int d) {
  ToeplitzParams p;
  p.alphas.assign(static_cast<size_t>(d) - 1, 0.0);
  p.alphas[0] = alpha;
  if (d >= 3) p.alphas[1] = beta;
  return toeplitz_matrix(p);
}

AtomVector two_dependence_witness(double alpha, double beta, int d) {
  if (d < 6) fail(Errc::PreconditionFailed, "the explicit witness table needs d >= 6");
  if (!two_dependence_member(alpha, beta, d))
    fail(Errc::PreconditionFailed, "parameters lie outside the feasible region");
  const double kappa = alpha / d;
  const double mu = beta / d;
  const double nu = std::min(kappa / 2.0, mu);
  const double xi1 = 1.0 / d - kappa - mu + nu;
  const double xi2 = 1.0 / d - 2.0 * kappa - mu + 2.0 * nu;
  const double xi3 = 1.0 / d - 2.0 * kappa - 2.0 * mu + 3.0 * nu;

  AtomVector atoms;
  atoms.d = d;
  double used = 0.0;
  auto add = [&](std::uint64_t mask, double w) {
    w = std::max(w, 0.0);
    used += w;
    if (w > 0.0) atoms.weights[BinaryVertex{d, mask}] += w;
  };
  auto at = [&](int pos) { return 1ull << (pos - 1); };  // 1-based position

  add(at(1), xi1);
  add(at(d), xi1);
  add(at(2), xi2);
  add(at(d - 1), xi2);
  add(at(1) | at(2), kappa - nu);
  add(at(d - 1) | at(d), kappa - nu);
  for (int i = 3; i <= d - 2; ++i) add(at(i), xi3);
  for (int i = 2; i <= d - 2; ++i) add(at(i) | at(i + 1), kappa - 2.0 * nu);
  for (int i = 1; i <= d - 2; ++i) {
    add(at(i) | at(i + 2), mu - nu);
    add(at(i) | at(i + 1) | at(i + 2), nu);
  }
  if (used < 1.0) atoms.weights[BinaryVertex::zero(d)] += 1.0 - used;
  return atoms;
}

bool cross_bcm_member(const CrossParams& p) {
  const int d = p.dim();
  if (d < 2) fail(Errc::BadShape, "the coupled family needs d >= 2");
  if (static_cast<int>(p.alphas.size()) != d - 1)
    fail(Errc::WrongLength, "expected one coupling per leading diagonal entry");
  for (double b : p.betas)
    if (!in_unit(b)) return false;
  double sum_a = 0.0, sum_b = p.betas.back();
  for (int i = 0; i < d - 1; ++i) {
    const double a = p.alphas[static_cast<size_t>(i)];
    if (a < -kTol || a > p.betas[static_cast<size_t>(i)] + kTol) return false;
    sum_a += a;
    sum_b += p.betas[static_cast<size_t>(i)];
  }
  return sum_a <= p.betas.back() + kTol && sum_b - sum_a <= 1.0 + kTol;
}

bool cross_tdm_member(const std::vector<double>& alphas) {
  double sum = 0.0;
  for (double a : alphas) {
    if (a < -kTol) return false;
    sum += a;
  }
  return sum <= 1.0 + kTol;
}

CandidateMatrix cross_bcm_matrix(const CrossParams& p) {
  const int d = p.dim();
  if (static_cast<int>(p.alphas.size()) != d - 1)
    fail(Errc::WrongLength, "expected one coupling per leading diagonal entry");
  CandidateMatrix m(d);
  for (int i = 0; i < d; ++i) m.at(i, i) = p.betas[static_cast<size_t>(i)];
  for (int i = 0; i < d - 1; ++i) {
    m.at(i, d - 1) = p.alphas[static_cast<size_t>(i)];
    m.at(d - 1, i) = p.alphas[static_cast<size_t>(i)];
  }
  return m;
}

CandidateMatrix cross_tdm_matrix(const std::vector<double>& alphas) {
  CrossParams p;
  p.alphas = alphas;
  p.betas.assign(alphas.size() + 1, 1.0);
  return cross_bcm_matrix(p);
}

double two_sector_gamma_upper(double alpha, double beta, int d1, int d2,
                              std::vector<int>* warm_basis) {
  if (d1 < 1 || d2 < 1) fail(Errc::BadShape, "both sector sizes must be positive");
  if (d1 >= 2 && !in_unit(alpha)) fail(Errc::EntryOutOfRange, "alpha must lie in [0,1]");
  if (d2 >= 2 && !in_unit(beta)) fail(Errc::EntryOutOfRange, "beta must lie in [0,1]");
  const int d = d1 + d2;
  const auto c = pascal(std::max(d1, d2));
  auto binom = [&](int n, int k) {
    return (k < 0 || k > n) ? 0.0 : c[static_cast<size_t>(n)][static_cast<size_t>(k)];
  };

  const int n = (d1 + 1) * (d2 + 1);
  auto idx = [&](int i, int j) { return i * (d2 + 1) + j; };

  lp::Problem prob;
  prob.objective.assign(static_cast<size_t>(n), 0.0);
  for (int i = 1; i <= d1; ++i)
    for (int j = 1; j <= d2; ++j)
      prob.objective[static_cast<size_t>(idx(i, j))] = -binom(d1 - 1, i - 1) * binom(d2 - 1, j - 1);

  std::vector<double> row(static_cast<size_t>(n), 0.0);
  auto push_row = [&](auto coeff, double rhs) {
    std::fill(row.begin(), row.end(), 0.0);
    for (int i = 0; i <= d1; ++i)
      for (int j = 0; j <= d2; ++j) row[static_cast<size_t>(idx(i, j))] = coeff(i, j);
    prob.add_row(row, lp::Sense::Eq, rhs);
  };

  push_row([&](int i, int j) { return binom(d1, i) * binom(d2, j); }, 1.0);
  push_row([&](int i, int j) { return binom(d1 - 1, i - 1) * binom(d2, j); }, 1.0 / d);
  push_row([&](int i, int j) { return binom(d1, i) * binom(d2 - 1, j - 1); }, 1.0 / d);
  if (d1 >= 2)
    push_row([&](int i, int j) { return binom(d1 - 2, i - 2) * binom(d2, j); }, alpha / d);
  if (d2 >= 2)
    push_row([&](int i, int j) { return binom(d1, i) * binom(d2 - 2, j - 2); }, beta / d);

  lp::Options opt;
  if (warm_basis && !warm_basis->empty()) opt.warm_basis = warm_basis;
  const auto sol = lp::solve(prob, opt);
  if (sol.status != lp::Status::Optimal)
    fail(Errc::NumericalBreakdown, "the sector moment program must be solvable");
  if (warm_basis) *warm_basis = sol.basis;
  return std::clamp(d * -sol.objective, 0.0, 1.0);
}

bool two_sector_member(const TwoSectorParams& p) {
  if (p.d1 < 1 || p.d2 < 1) fail(Errc::BadShape, "both sector sizes must be positive");
  if (p.d1 >= 2 && !in_unit(p.alpha)) return false;
  if (p.d2 >= 2 && !in_unit(p.beta)) return false;
  if (p.gamma < -kTol) return false;
  return p.gamma <= two_sector_gamma_upper(p.alpha, p.beta, p.d1, p.d2) + kTol;
}

CandidateMatrix two_sector_matrix(const TwoSectorParams& p) {
  const int d = p.d1 + p.d2;
  CandidateMatrix m(d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      if (i == j) {
        m.at(i, j) = 1.0;
      } else if (i < p.d1 && j < p.d1) {
        m.at(i, j) = p.alpha;
      } else if (i >= p.d1 && j >= p.d1) {
        m.at(i, j) = p.beta;
      } else {
        m.at(i, j) = p.gamma;
      }
    }
  return m;
}

std::vector<FacetInequality> known_facets(int d1, int d2) {
  const auto nonneg = [] {
    return std::vector<FacetInequality>{{1, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 1, 0},
                                        {-1, 0, 0, 1}, {0, -1, 0, 1}};
  };
  if (d1 == 1 && d2 == 2)
    return {{0, 1, 0, 0}, {0, 0, 1, 0}, {0, -1, 0, 1}, {0, 1, -2, 1}};
  if (d1 == 2 && d2 == 2) {
    auto f = nonneg();
    f.push_back({1, 0, -2, 1});
    f.push_back({0, 1, -2, 1});
    return f;
  }
  if (d1 == 3 && d2 == 3) {
    auto f = nonneg();
    f.push_back({3, 0, -3, 1});
    f.push_back({0, 3, -3, 1});
    f.push_back({3, 1, -6, 2});
    f.push_back({1, 3, -6, 2});
    return f;
  }
  if (d1 == 2 && d2 == 4) {
    auto f = nonneg();
    f.push_back({1, 0, -2, 1});
    f.push_back({0, 6, -4, 1});
    f.push_back({1, 6, -8, 2});
    f.push_back({1, 3, -6, 2});
    return f;
  }
  if (d1 == 4 && d2 == 4) {
    auto f = nonneg();
    f.push_back({6, 0, -4, 1});
    f.push_back({0, 6, -4, 1});
    f.push_back({1, 2, -4, 1});
    f.push_back({2, 1, -4, 1});
    f.push_back({1, 6, -8, 2});
    f.push_back({6, 1, -8, 2});
    return f;
  }
  fail(Errc::UnknownCase, "no stored facet description for this sector pair");
}

std::vector<std::array<double, 3>> known_vertices(int d1, int d2) {
  const double q3 = 1.0 / 3.0, q4 = 0.25, h = 0.5;
  if (d1 == 1 && d2 == 2)
    return {{0, 0, 0}, {0, 0, h}, {0, 1, 0}, {0, 1, 1}};
  std::vector<std::array<double, 3>> base = {{0, 0, 0}, {0, 1, 0}, {1, 0, 0}, {1, 1, 0}, {1, 1, 1}};
  if (d1 == 2 && d2 == 2) {
    base.insert(base.end(), {{0, 0, h}, {0, 1, h}, {1, 0, h}});
    return base;
  }
  if (d1 == 3 && d2 == 3) {
    base.insert(base.end(),
                {{0, 0, q3}, {0, 1, q3}, {1, 0, q3}, {q3, 1, 2 * q3}, {1, q3, 2 * q3}});
    return base;
  }
  if (d1 == 2 && d2 == 4) {
    base.insert(base.end(), {{0, 0, q4},
                             {0, 1, h},
                             {1, 0, q4},
                             {1, h, 0.75},
                             {1, 1.0 / 6.0, h},
                             {0, q3, h}});
    return base;
  }
  if (d1 == 4 && d2 == 4) {
    base.insert(base.end(), {{0, 0, q4},
                             {0, 1, q4},
                             {1, 0, q4},
                             {h, 1, 0.75},
                             {1, h, 0.75},
                             {1.0 / 6.0, 1, h},
                             {1, 1.0 / 6.0, h}});
    return base;
  }
  fail(Errc::UnknownCase, "no stored vertex description for this sector pair");
}

}  // namespace tdm
