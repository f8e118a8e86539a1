#include "tdm/colgen.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <unordered_set>

#include "json.hpp"
#include "tdm/errors.hpp"
#include "tdm/lp.hpp"

namespace tdm {
namespace {

struct Spectrum {
  double lmin = 0.0;
  double lmax = 0.0;
  bool converged = false;
};

Spectrum jacobi_spectrum(const PricingMatrix& g, int max_sweeps = 60) {
  const int d = g.d;
  Spectrum out;
  if (d == 1) return {g.g[0], g.g[0], true};
  std::vector<double> a = g.g;
  auto at = [&](int i, int j) -> double& { return a[static_cast<size_t>(i) * d + j]; };
  double maxabs = 0.0;
  for (double v : a) maxabs = std::max(maxabs, std::abs(v));
  const double thresh = 1e-9 * (1.0 + maxabs);

  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double off = 0.0;
    for (int i = 0; i < d; ++i)
      for (int j = i + 1; j < d; ++j) off += 2.0 * at(i, j) * at(i, j);
    if (std::sqrt(off) <= thresh) {
      out.converged = true;
      break;
    }
    for (int i = 0; i < d; ++i)
      for (int j = i + 1; j < d; ++j) {
        const double aij = at(i, j);
        if (std::abs(aij) <= thresh / (10.0 * d)) continue;
        const double theta = (at(j, j) - at(i, i)) / (2.0 * aij);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        const double aii = at(i, i), ajj = at(j, j);
        at(i, i) = c * c * aii - 2.0 * c * s * aij + s * s * ajj;
        at(j, j) = s * s * aii + 2.0 * c * s * aij + c * c * ajj;
        at(i, j) = 0.0;
        at(j, i) = 0.0;
        for (int k = 0; k < d; ++k) {
          if (k == i || k == j) continue;
          const double aik = at(i, k), ajk = at(j, k);
          at(i, k) = c * aik - s * ajk;
          at(k, i) = at(i, k);
          at(j, k) = s * aik + c * ajk;
          at(k, j) = at(j, k);
        }
      }
  }
  out.lmin = at(0, 0);
  out.lmax = at(0, 0);
  for (int i = 1; i < d; ++i) {
    out.lmin = std::min(out.lmin, at(i, i));
    out.lmax = std::max(out.lmax, at(i, i));
  }
  return out;
}

void gershgorin_bounds(const PricingMatrix& g, double& lo, double& hi) {
  const int d = g.d;
  lo = g.at(0, 0);
  hi = g.at(0, 0);
  for (int i = 0; i < d; ++i) {
    double radius = 0.0;
    for (int j = 0; j < d; ++j)
      if (j != i) radius += std::abs(g.at(i, j));
    lo = std::min(lo, g.at(i, i) - radius);
    hi = std::max(hi, g.at(i, i) + radius);
  }
}

double quadratic_value(const PricingMatrix& g, std::uint64_t mask) {
  double val = 0.0;
  for (int i = 0; i < g.d; ++i) {
    if (!(mask >> i & 1ull)) continue;
    for (int j = 0; j < g.d; ++j)
      if (mask >> j & 1ull) val += g.at(i, j);
  }
  return val;
}

}  // namespace

std::vector<BinaryVertex> initial_vertex_set(int d) {
  if (d < 1) fail(Errc::BadShape, "dimension must be positive");
  std::vector<BinaryVertex> out;
  std::unordered_set<std::uint64_t> seen;
  auto push = [&](std::uint64_t bits) {
    if (seen.insert(bits).second) out.push_back(BinaryVertex{d, bits});
  };
  push(0);
  for (int i = 0; i < d; ++i) push(1ull << i);
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j) push((1ull << i) | (1ull << j));
  push(d >= 64 ? ~0ull : (1ull << d) - 1);
  return out;
}

std::vector<BinaryVertex> initial_vertex_set(const ValidatedMatrix& b) {
  return initial_vertex_set(b.dim());
}

PricingMatrix assemble_pricing_matrix(int d, const std::vector<double>& moment_duals) {
  if (static_cast<int>(moment_duals.size()) != moment_length(d))
    fail(Errc::WrongLength, "expected one dual price per moment row");
  PricingMatrix g;
  g.d = d;
  g.g.assign(static_cast<size_t>(d) * d, 0.0);
  g.offset = moment_duals[0];
  for (int i = 0; i < d; ++i)
    g.g[static_cast<size_t>(i) * d + i] = moment_duals[static_cast<size_t>(1 + i)];
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j) {
      const double half = moment_duals[static_cast<size_t>(pair_index(d, i, j))] / 2.0;
      g.g[static_cast<size_t>(i) * d + j] = half;
      g.g[static_cast<size_t>(j) * d + i] = half;
    }
  return g;
}

std::pair<BinaryVertex, double> pricing_exact(const PricingMatrix& g, int cap) {
  const int d = g.d;
  if (d > cap)
    fail(Errc::DimensionTooLarge, "exhaustive pricing supports d <= " + std::to_string(cap));
  std::vector<double> s(static_cast<size_t>(d), 0.0);  // s = G x
  double val = 0.0;
  std::uint64_t cur = 0, best_mask = 0;
  double best_val = 0.0;
  const std::uint64_t total = 1ull << d;
  for (std::uint64_t k = 1; k < total; ++k) {
    const int b = std::countr_zero(k);
    cur ^= 1ull << b;
    const double delta = (cur >> b & 1ull) ? 1.0 : -1.0;
    val += 2.0 * delta * s[static_cast<size_t>(b)] + g.at(b, b);
    const double* row = g.g.data() + static_cast<size_t>(b) * d;
    for (int j = 0; j < d; ++j) s[static_cast<size_t>(j)] += delta * row[j];
    if (val > best_val) {
      best_val = val;
      best_mask = cur;
    }
  }
  return {BinaryVertex{d, best_mask}, best_val};
}

double eigen_max_symmetric(const PricingMatrix& g) {
  const auto spec = jacobi_spectrum(g);
  if (!spec.converged)
    fail(Errc::NoConvergence, "Jacobi sweeps did not reduce the off-diagonal norm");
  return spec.lmax;
}

std::pair<BinaryVertex, double> pricing_qp_relaxed(const PricingMatrix& g, double epsilon,
                                                   int steps) {
  if (epsilon <= 0) fail(Errc::PreconditionFailed, "spectral shift must be positive");
  const int d = g.d;
  const auto spec = jacobi_spectrum(g);
  double lmax = spec.lmax, lmin = spec.lmin;
  if (!spec.converged) gershgorin_bounds(g, lmin, lmax);
  const double f = lmax + epsilon;
  // ascent step from the gradient Lipschitz constant 2(f - lambda_min)
  const double denom = std::max(2.0 * (f - std::min(0.0, lmin)), 1e-6);
  const double step = 1.0 / denom;

  std::vector<double> p(static_cast<size_t>(d), 0.5), grad(static_cast<size_t>(d));
  for (int it = 0; it < steps; ++it) {
    for (int i = 0; i < d; ++i) {
      double gp = 0.0;
      for (int j = 0; j < d; ++j) gp += g.at(i, j) * p[static_cast<size_t>(j)];
      grad[static_cast<size_t>(i)] = 2.0 * (gp - f * p[static_cast<size_t>(i)]) + f;
    }
    for (int i = 0; i < d; ++i)
      p[static_cast<size_t>(i)] =
          std::clamp(p[static_cast<size_t>(i)] + step * grad[static_cast<size_t>(i)], 0.0, 1.0);
  }

  std::uint64_t mask = 0;
  for (int i = 0; i < d; ++i)
    if (p[static_cast<size_t>(i)] >= 0.5) mask |= 1ull << i;  // ties round to 1
  return {BinaryVertex{d, mask}, quadratic_value(g, mask)};
}

double dual_bound(double master_objective, double min_reduced_cost) {
  return master_objective + std::min(0.0, min_reduced_cost);
}

namespace {

// master variables: [t, x_0 .. x_{N-1}]; rows: mass equality, then per
// moment row i >= 1 the pair (sum_v a_v[i] x_v - t <= p_i,
//                             sum_v a_v[i] x_v + t >= p_i)
lp::Problem build_master(const std::vector<std::vector<double>>& cols,
                         const std::vector<double>& p) {
  const int m = static_cast<int>(p.size());
  const int n = static_cast<int>(cols.size());
  lp::Problem prob;
  prob.objective.assign(static_cast<size_t>(1 + n), 0.0);
  prob.objective[0] = 1.0;

  std::vector<double> row(static_cast<size_t>(1 + n), 0.0);
  row[0] = 0.0;
  for (int j = 0; j < n; ++j) row[static_cast<size_t>(1 + j)] = 1.0;
  prob.add_row(row, lp::Sense::Eq, 1.0);
  for (int i = 1; i < m; ++i) {
    row[0] = -1.0;
    for (int j = 0; j < n; ++j) row[static_cast<size_t>(1 + j)] = cols[static_cast<size_t>(j)][static_cast<size_t>(i)];
    prob.add_row(row, lp::Sense::Le, p[static_cast<size_t>(i)]);
  }
  for (int i = 1; i < m; ++i) {
    row[0] = 1.0;
    for (int j = 0; j < n; ++j) row[static_cast<size_t>(1 + j)] = cols[static_cast<size_t>(j)][static_cast<size_t>(i)];
    prob.add_row(row, lp::Sense::Ge, p[static_cast<size_t>(i)]);
  }
  return prob;
}

std::vector<double> farkas_style_ray(const std::vector<double>& u, double best_inner) {
  std::vector<double> ray(u.size());
  for (size_t i = 0; i < u.size(); ++i) ray[i] = -u[i];
  ray[0] += std::max(0.0, best_inner);
  return normalized_ray(ray);
}

}  // namespace

std::string ColgenResult::stats_json() const {
  nlohmann::ordered_json j;
  j["distance"] = distance;
  j["iterations"] = iterations;
  j["pricing_calls_exact"] = pricing_calls_exact;
  j["pricing_calls_relaxed"] = pricing_calls_relaxed;
  j["pricing_time_fraction"] = pricing_time_fraction;
  return j.dump(2);
}

ColgenResult check_membership_colgen(const ValidatedMatrix& b, const ColgenConfig& cfg) {
  using clock = std::chrono::steady_clock;
  const auto t_start = clock::now();
  if (b.mode() != Mode::Bcm)
    fail(Errc::PreconditionFailed, "column generation expects a matrix validated as Bcm");
  if (cfg.epsilon <= 0) fail(Errc::PreconditionFailed, "spectral shift must be positive");
  if (cfg.exact_period < 1) fail(Errc::PreconditionFailed, "exact-pricing period must be >= 1");

  const int d = b.dim();
  const bool exact_available = d <= cfg.exact_cap;
  if (cfg.pricing == PricingMode::ExactBQP && !exact_available)
    fail(Errc::DimensionTooLarge,
         "exhaustive pricing supports d <= " + std::to_string(cfg.exact_cap));
  const auto p = moment_vector(b).values;
  const int m = static_cast<int>(p.size());

  std::vector<BinaryVertex> vertices = initial_vertex_set(d);
  std::vector<std::vector<double>> cols;
  std::unordered_set<std::uint64_t> present;
  cols.reserve(vertices.size());
  for (const auto& v : vertices) {
    cols.push_back(vertex_column(v));
    present.insert(v.bits);
  }

  ColgenResult result;
  double pricing_seconds = 0.0;
  double best_lower = -1.0;
  double t_star = 0.0;
  std::vector<int> warm;
  bool use_warm = false;
  int stall_count = 0;

  auto finish = [&](bool converged, std::optional<MembershipVerdict> verdict, double lower,
                    double upper) {
    result.converged = converged;
    result.verdict = std::move(verdict);
    result.lower_bound = std::max(0.0, lower);
    result.upper_bound = upper;
    result.distance = upper;
    const double total =
        std::chrono::duration<double>(clock::now() - t_start).count();
    result.pricing_time_fraction = total > 0 ? std::clamp(pricing_seconds / total, 0.0, 1.0) : 0.0;
    return result;
  };

  auto member_verdict = [&]() {
    MembershipVerdict v;
    v.member = true;
    v.method = "colgen";
    v.distance = std::max(0.0, t_star);
    auto cert = extract_certificate(b, vertices, cfg.tol);
    if (!cert) cert = extract_certificate(b, vertices, cfg.tol * 100);
    if (cert) {
      v.certificate = std::move(*cert);
    } else {
      fail(Errc::NumericalBreakdown, "converged master admits no basic certificate");
    }
    return v;
  };

  auto nonmember_verdict = [&](const std::vector<double>& u, double best_inner) {
    MembershipVerdict v;
    v.member = false;
    v.method = "colgen";
    v.distance = t_star;
    v.farkas_ray = farkas_style_ray(u, best_inner);
    return v;
  };

  for (int iter = 0; iter < cfg.max_iterations; ++iter) {
    result.iterations = iter + 1;
    lp::Options lpo;
    lpo.feas_tol = cfg.tol;
    lpo.warm_basis = (use_warm && !warm.empty()) ? &warm : nullptr;
    const auto master = build_master(cols, p);
    const auto sol = lp::solve(master, lpo);
    if (sol.status != lp::Status::Optimal)
      fail(Errc::NumericalBreakdown, "restricted master failed to solve");
    t_star = sol.objective;
    warm = sol.basis;
    use_warm = true;

    // primal short-circuit: the present columns already reproduce the moment
    // vector, so membership is settled without any pricing bound
    if (t_star <= cfg.tol) return finish(true, member_verdict(), 0.0, t_star);

    // fold row duals to moment space: u^T a_v is the negated reduced cost
    std::vector<double> u(static_cast<size_t>(m), 0.0);
    u[0] = sol.dual[0];
    for (int i = 1; i < m; ++i)
      u[static_cast<size_t>(i)] = sol.dual[static_cast<size_t>(i)] +
                                  sol.dual[static_cast<size_t>(m - 1 + i)];
    const auto g = assemble_pricing_matrix(d, u);

    const bool scheduled_exact =
        exact_available && (cfg.pricing == PricingMode::ExactBQP ||
                            (cfg.pricing == PricingMode::Hybrid && iter % cfg.exact_period == 0));

    std::uint64_t candidate = 0;
    bool have_candidate = false;
    bool exact_this_iter = scheduled_exact;
    double best_inner = 0.0;  // max over priced vertices of u^T a_v

    if (!scheduled_exact) {
      const auto t0 = clock::now();
      const auto [v, val] = pricing_qp_relaxed(g, cfg.epsilon, cfg.qp_steps);
      pricing_seconds += std::chrono::duration<double>(clock::now() - t0).count();
      ++result.pricing_calls_relaxed;
      const double inner = val + g.offset;
      if (inner > cfg.tol && !present.count(v.bits)) {
        candidate = v.bits;
        have_candidate = true;
      } else {
        exact_this_iter = true;  // relaxed pricing found no new violating column
      }
    }

    if (exact_this_iter) {
      // beyond the exhaustive-pricing cap there is no certified bound, so a
      // stalled relaxed search leaves the instance undecided
      if (!exact_available) return finish(false, std::nullopt, 0.0, t_star);
      const auto t0 = clock::now();
      const auto [v, val] = pricing_exact(g, cfg.exact_cap);
      pricing_seconds += std::chrono::duration<double>(clock::now() - t0).count();
      ++result.pricing_calls_exact;
      best_inner = val + g.offset;
      const double min_rc = -best_inner;

      if (best_inner <= cfg.tol) {
        // no improving column exists anywhere: t_star is the true distance
        if (t_star <= cfg.tol) return finish(true, member_verdict(), t_star, t_star);
        return finish(true, nonmember_verdict(u, best_inner), t_star, t_star);
      }
      best_lower = std::max(best_lower, dual_bound(t_star, min_rc));
      if (cfg.early_exit && dual_bound(t_star, min_rc) > cfg.tol)
        return finish(true, nonmember_verdict(u, best_inner), dual_bound(t_star, min_rc), t_star);
      if (present.count(v.bits)) {
        // pricing re-proposed a master column: dual/tolerance mismatch,
        // retry once from a cold basis before giving up
        if (++stall_count > 1)
          fail(Errc::NumericalBreakdown, "pricing repeatedly re-proposed master columns");
        use_warm = false;
        continue;
      }
      stall_count = 0;
      candidate = v.bits;
      have_candidate = true;
    }

    if (have_candidate) {
      const int old_n_struct = 1 + static_cast<int>(cols.size());
      BinaryVertex v{d, candidate};
      vertices.push_back(v);
      cols.push_back(vertex_column(v));
      present.insert(candidate);
      for (int& idx : warm)
        if (idx >= old_n_struct) ++idx;  // slacks shift past the appended column
    }
  }

  return finish(false, std::nullopt, best_lower, t_star);
}

}  // namespace tdm
