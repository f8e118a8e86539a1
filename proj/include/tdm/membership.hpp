#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tdm/lp.hpp"
#include "tdm/matrix.hpp"

namespace tdm {

// Basic: extracted from an optimal LP basis, Caratheodory support bound
// applies. Expanded: orbit weights spread uniformly over orbit members.
// Generator: the atom list a sampler built a matrix from.
enum class CertificateKind { Basic, Expanded, Generator };

struct Certificate {
  int d = 0;
  std::vector<BinaryVertex> vertices;
  std::vector<double> weights;
  CertificateKind kind = CertificateKind::Basic;

  AtomVector atoms() const;
};

struct VerifyReport {
  bool ok = false;
  double residual = 0.0;
  std::vector<std::string> reasons;
};

// Checks weights (nonnegative, sum 1), reconstruction residual in max norm,
// and for Basic certificates the support bound d(d+1)/2 + 1.
VerifyReport verify_certificate(const ValidatedMatrix& b, const Certificate& cert,
                                double tol = kTol);

struct MembershipVerdict {
  bool member = false;
  std::string method;
  std::optional<Certificate> certificate;
  std::optional<std::vector<double>> farkas_ray;  // moment_length(d) entries, max |y_i| = 1
  std::optional<double> distance;
};

struct ExactOptions {
  int enumeration_cap = 20;
  double tol = kTol;
};

// Full-enumeration membership oracle: feasibility of the moment system over
// all 2^d vertex columns.
MembershipVerdict check_bcm_full(const ValidatedMatrix& b, const ExactOptions& opt = {});

enum class Method { Auto, Full, Symmetric, Colgen };

// Scales by 1/d and dispatches to the selected membership check; defined
// with the method implementations it routes to.
MembershipVerdict check_tdm(const ValidatedMatrix& t, Method method = Method::Full,
                            const ExactOptions& opt = {});

// Solves the moment system restricted to the given columns and extracts a
// basic certificate; nullopt when the restricted system is infeasible.
std::optional<Certificate> extract_certificate(const ValidatedMatrix& b,
                                               const std::vector<BinaryVertex>& vertices,
                                               double tol = kTol);

// Scales a ray so max |y_i| = 1.
std::vector<double> normalized_ray(std::vector<double> y);

// Flattens an atom map into certificate form, dropping nonpositive weights.
Certificate certificate_from_atoms(const AtomVector& atoms,
                                   CertificateKind kind = CertificateKind::Basic);

std::string verdict_to_json(const MembershipVerdict& v);

}  // namespace tdm
