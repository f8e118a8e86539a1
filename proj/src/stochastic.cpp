#include "tdm/stochastic.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "tdm/errors.hpp"

namespace tdm {

namespace {

void check_config(const SimConfig& cfg) {
  if (cfg.n < 1) fail(Errc::PreconditionFailed, "sample count must be at least 1");
  if (cfg.dim < 1) fail(Errc::PreconditionFailed, "dimension must be at least 1");
  if (cfg.burn_in < 0) fail(Errc::PreconditionFailed, "burn-in must be nonnegative");
}

double frechet(SplitMix64& rng) { return -1.0 / std::log(rng.uniform()); }

}  // namespace

SampleMatrix simulate_ar1_max(double phi, const SimConfig& cfg) {
  if (!(phi >= 0.0 && phi < 1.0)) {
    fail(Errc::PreconditionFailed, "ar1 parameter must lie in [0,1)");
  }
  check_config(cfg);
  SplitMix64 rng(cfg.seed);
  SampleMatrix out;
  out.n = cfg.n;
  out.d = cfg.dim;
  out.data.resize(static_cast<size_t>(cfg.n) * cfg.dim);

  double x = frechet(rng);
  for (long k = 0; k < cfg.burn_in; ++k) x = std::max(phi * x, frechet(rng));
  for (size_t t = 0; t < out.data.size(); ++t) {
    x = std::max(phi * x, frechet(rng));
    out.data[t] = x;
  }
  return out;
}

SampleMatrix simulate_two_dependent(double a, double b, double c, const SimConfig& cfg) {
  if (a < -kTol || b < -kTol || c < -kTol || std::abs(a + b + c - 1.0) > 1e-9) {
    fail(Errc::InvalidWeights, "weights must be nonnegative and sum to 1");
  }
  check_config(cfg);
  SplitMix64 rng(cfg.seed);
  SampleMatrix out;
  out.n = cfg.n;
  out.d = cfg.dim;
  out.data.resize(static_cast<size_t>(cfg.n) * cfg.dim);

  double x2 = frechet(rng);  // X_{i-2}
  double x1 = frechet(rng);  // X_{i-1}
  for (size_t t = 0; t < out.data.size(); ++t) {
    double x0 = frechet(rng);
    out.data[t] = std::max({c * x2, b * x1, a * x0});
    x2 = x1;
    x1 = x0;
  }
  return out;
}

TdcEstimate empirical_tdc(const SampleMatrix& samples, int i, int j, double u) {
  if (i < 0 || j < 0 || i >= samples.d || j >= samples.d || i == j) {
    fail(Errc::PreconditionFailed, "column indices out of range");
  }
  if (!(u > 0.0 && u < 0.5)) fail(Errc::PreconditionFailed, "threshold must lie in (0, 0.5)");
  const long n = samples.n;
  const double expected = u * static_cast<double>(n);
  if (expected < 100.0) fail(Errc::TooFewExceedances, "need u*n >= 100 tail observations");

  // empirical (1-u)-quantile: the ceil(n(1-u))-th ascending order statistic
  long rank = static_cast<long>(std::ceil((1.0 - u) * static_cast<double>(n)));
  rank = std::clamp(rank, 1L, n);
  auto threshold = [&](int col) {
    std::vector<double> v(static_cast<size_t>(n));
    for (long r = 0; r < n; ++r) v[static_cast<size_t>(r)] = samples.at(r, col);
    std::nth_element(v.begin(), v.begin() + (rank - 1), v.end());
    return v[static_cast<size_t>(rank - 1)];
  };
  const double qi = threshold(i);
  const double qj = threshold(j);

  long joint = 0;
  for (long r = 0; r < n; ++r) {
    if (samples.at(r, i) > qi && samples.at(r, j) > qj) ++joint;
  }
  TdcEstimate est;
  est.exceedances = joint;
  est.value = static_cast<double>(joint) / expected;
  est.se = std::sqrt(std::max(est.value * (1.0 - est.value), 0.0) / expected);
  return est;
}

namespace {

GeneratedInstance generate_mixture(int d, std::uint64_t seed, bool lift_first) {
  if (d < 1 || d > 62) fail(Errc::DimensionTooLarge, "generator supports d up to 62");
  SplitMix64 rng(seed);
  const double lo = static_cast<double>(d) * d;
  const double hi = lo * lo;
  long count = static_cast<long>(lo + std::floor(rng.uniform() * (hi - lo + 1.0)));
  count = std::clamp(count, static_cast<long>(lo), static_cast<long>(hi));

  const std::uint64_t mask_all = (d == 62) ? ((1ull << 62) - 1) : ((1ull << d) - 1);
  std::vector<BinaryVertex> vertices;
  std::vector<double> weights;
  vertices.reserve(static_cast<size_t>(count));
  weights.reserve(static_cast<size_t>(count));
  double total = 0.0;
  for (long k = 0; k < count; ++k) {
    vertices.emplace_back(d, rng.next() & mask_all);
    double e = -std::log(rng.uniform());  // flat Dirichlet via normalized exponentials
    weights.push_back(e);
    total += e;
  }
  for (double& w : weights) w /= total;

  CandidateMatrix m;
  m.d = d;
  m.entries.assign(static_cast<size_t>(d) * d, 0.0);
  for (size_t k = 0; k < vertices.size(); ++k) {
    const std::uint64_t bits = vertices[k].bits;
    const double w = weights[k];
    for (int r = 0; r < d; ++r) {
      if (!((bits >> r) & 1u)) continue;
      for (int c = 0; c < d; ++c) {
        if ((bits >> c) & 1u) m.entries[static_cast<size_t>(r) * d + c] += w;
      }
    }
  }
  for (int r = 0; r < d; ++r) {
    for (int c = r + 1; c < d; ++c) {  // exact symmetry despite accumulation order
      double v = 0.5 * (m.at(r, c) + m.at(c, r));
      m.entries[static_cast<size_t>(r) * d + c] = v;
      m.entries[static_cast<size_t>(c) * d + r] = v;
    }
  }

  GeneratedInstance inst{std::move(m), Certificate{d, std::move(vertices), std::move(weights), CertificateKind::Generator}, true};

  if (lift_first) {
    const std::uint64_t bits = inst.generator.vertices.front().bits;
    const double step = 1.0 / static_cast<double>(d);
    for (int r = 0; r < d; ++r) {
      if (!((bits >> r) & 1u)) continue;
      for (int c = 0; c < d; ++c) {
        if ((bits >> c) & 1u) inst.matrix.entries[static_cast<size_t>(r) * d + c] += step;
      }
    }
    for (double v : inst.matrix.entries) {
      if (v > 1.0 + kTol) inst.in_range = false;
    }
  }
  return inst;
}

}  // namespace

GeneratedInstance gen_class3(int d, std::uint64_t seed) { return generate_mixture(d, seed, false); }

GeneratedInstance gen_class5(int d, std::uint64_t seed) { return generate_mixture(d, seed, true); }

void write_samples_csv(const SampleMatrix& samples, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail(Errc::ParseError, "cannot open " + path + " for writing");
  out.precision(17);
  for (long r = 0; r < samples.n; ++r) {
    for (int c = 0; c < samples.d; ++c) {
      if (c) out << ',';
      out << samples.at(r, c);
    }
    out << '\n';
  }
}

}  // namespace tdm
