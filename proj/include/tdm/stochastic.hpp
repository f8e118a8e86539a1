#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tdm/matrix.hpp"
#include "tdm/membership.hpp"

namespace tdm {

// SplitMix64: state advances by the golden-ratio increment and the output is
// finalized by two xor-shift multiplies. Deterministic across platforms.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  // strictly inside (0,1): 53-bit mantissa plus a half-step offset
  double uniform() { return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53; }

 private:
  std::uint64_t state_;
};

struct SimConfig {
  long n = 1000;       // observations (rows)
  int dim = 2;         // coordinates per observation
  long burn_in = 1000; // pre-sample steps discarded from recursive processes
  std::uint64_t seed = 1;
  std::vector<double> levels = {0.005};  // tail thresholds for summaries
};

struct SampleMatrix {
  long n = 0;
  int d = 0;
  std::vector<double> data;  // row-major

  double at(long r, int c) const { return data[static_cast<size_t>(r) * d + c]; }
};

// Max-autoregressive recursion X_k = max(phi X_{k-1}, Z_k) with unit Frechet
// innovations Z = -1/ln(U). Rows are consecutive non-overlapping blocks of
// one stationary path; the tail dependence at lag k is phi^k.
SampleMatrix simulate_ar1_max(double phi, const SimConfig& cfg);

// Moving maximum Y_i = max(c X_{i-2}, b X_{i-1}, a X_i) over an i.i.d. unit
// Frechet driver; weights must be nonnegative with a + b + c = 1. Tail
// dependence: lag 1 = min(a,b) + min(b,c), lag 2 = min(a,c), zero beyond.
SampleMatrix simulate_two_dependent(double a, double b, double c, const SimConfig& cfg);

struct TdcEstimate {
  double value = 0.0;
  double se = 0.0;  // binomial standard error sqrt(v(1-v)/(u n))
  long exceedances = 0;
};

// Fraction of rows where both columns exceed their empirical (1-u)-quantile,
// divided by u n. Needs u n >= 100.
TdcEstimate empirical_tdc(const SampleMatrix& samples, int i, int j, double u);

struct GeneratedInstance {
  CandidateMatrix matrix;
  Certificate generator;  // the atoms the matrix was mixed from
  bool in_range = true;   // false when an entry exceeds 1
};

// Random convex combination of N vertex outer products, N uniform on
// [d^2, d^4], vertices uniform with replacement, flat Dirichlet weights.
// Always a valid Bcm.
GeneratedInstance gen_class3(int d, std::uint64_t seed);

// Class-3 matrix plus (1/d) times the outer product of its first vertex;
// entries above 1 are flagged, not clipped.
GeneratedInstance gen_class5(int d, std::uint64_t seed);

void write_samples_csv(const SampleMatrix& samples, const std::string& path);

}  // namespace tdm
