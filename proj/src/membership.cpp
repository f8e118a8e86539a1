#include "tdm/membership.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

namespace tdm {

AtomVector Certificate::atoms() const {
  AtomVector a;
  a.d = d;
  for (size_t i = 0; i < vertices.size(); ++i) a.weights[vertices[i]] += weights[i];
  return a;
}

VerifyReport verify_certificate(const ValidatedMatrix& b, const Certificate& cert, double tol) {
  VerifyReport r;
  if (cert.d != b.dim() || cert.vertices.size() != cert.weights.size()) {
    r.reasons.push_back("certificate shape does not match the matrix");
    return r;
  }
  for (const BinaryVertex& v : cert.vertices)
    if (v.d != cert.d) {
      r.reasons.push_back("vertex dimension mismatch");
      return r;
    }

  double sum = 0.0;
  int support = 0;
  for (double w : cert.weights) {
    if (w < -tol) r.reasons.push_back("negative weight");
    sum += w;
    if (w > tol) ++support;
  }
  if (std::abs(sum - 1.0) > tol) r.reasons.push_back("weights do not sum to 1");
  // d(d+1)/2 + 1 == moment_length(d)
  if (cert.kind == CertificateKind::Basic && support > moment_length(cert.d))
    r.reasons.push_back("support exceeds the Caratheodory bound");

  CandidateMatrix rec = cert.atoms().induced_matrix();
  double residual = 0.0;
  for (int i = 0; i < b.dim(); ++i)
    for (int j = 0; j < b.dim(); ++j)
      residual = std::max(residual, std::abs(rec.at(i, j) - b.at(i, j)));
  r.residual = residual;
  if (residual > tol) r.reasons.push_back("reconstruction residual exceeds tolerance");

  r.ok = r.reasons.empty();
  return r;
}

std::vector<double> normalized_ray(std::vector<double> y) {
  double mx = 0.0;
  for (double v : y) mx = std::max(mx, std::abs(v));
  if (mx > 0.0)
    for (double& v : y) v /= mx;
  return y;
}

Certificate certificate_from_atoms(const AtomVector& atoms, CertificateKind kind) {
  Certificate c;
  c.d = atoms.d;
  c.kind = kind;
  for (const auto& [v, w] : atoms.weights) {
    if (w <= 0.0) continue;
    c.vertices.push_back(v);
    c.weights.push_back(w);
  }
  return c;
}

namespace {

// rows of the moment system over the given columns, equality senses
lp::Problem moment_system(const MomentVector& p, const std::vector<BinaryVertex>& verts) {
  int m = static_cast<int>(p.values.size());
  size_t n = verts.size();
  lp::Problem lpp;
  lpp.objective.assign(n, 0.0);
  lpp.rows.assign(static_cast<size_t>(m), std::vector<double>(n, 0.0));
  for (size_t j = 0; j < n; ++j) {
    std::vector<double> col = vertex_column(verts[j]);
    for (int i = 0; i < m; ++i) lpp.rows[static_cast<size_t>(i)][j] = col[static_cast<size_t>(i)];
  }
  lpp.senses.assign(static_cast<size_t>(m), lp::Sense::Eq);
  lpp.rhs = p.values;
  return lpp;
}

Certificate certificate_from_point(int d, const std::vector<BinaryVertex>& verts,
                                   const std::vector<double>& x, double tol) {
  Certificate c;
  c.d = d;
  c.kind = CertificateKind::Basic;
  for (size_t j = 0; j < verts.size(); ++j)
    if (x[j] > tol) {
      c.vertices.push_back(verts[j]);
      c.weights.push_back(x[j]);
    }
  return c;
}

}  // namespace

MembershipVerdict check_bcm_full(const ValidatedMatrix& b, const ExactOptions& opt) {
  if (b.mode() != Mode::Bcm) fail(Errc::PreconditionFailed, "check_bcm_full expects Bcm mode");
  int d = b.dim();
  if (d > opt.enumeration_cap)
    fail(Errc::DimensionTooLarge,
         "full enumeration capped at d = " + std::to_string(opt.enumeration_cap) +
             "; use column generation");

  std::vector<BinaryVertex> verts = ordered_vertices(d);
  MomentVector p = moment_vector(b);
  lp::Problem lpp = moment_system(p, verts);
  lp::Options lo;
  lo.feas_tol = opt.tol;
  lp::Solution sol = lp::solve(lpp, lo);

  MembershipVerdict v;
  v.method = "full";
  if (sol.status == lp::Status::Optimal) {
    v.member = true;
    v.certificate = certificate_from_point(d, verts, sol.primal, 1e-12);
  } else {
    v.member = false;
    v.farkas_ray = normalized_ray(sol.farkas);
  }
  return v;
}

std::optional<Certificate> extract_certificate(const ValidatedMatrix& b,
                                               const std::vector<BinaryVertex>& vertices,
                                               double tol) {
  MomentVector p = moment_vector(b);
  lp::Problem lpp = moment_system(p, vertices);
  lp::Options lo;
  lo.feas_tol = tol;
  lp::Solution sol = lp::solve(lpp, lo);
  if (sol.status != lp::Status::Optimal) return std::nullopt;
  return certificate_from_point(b.dim(), vertices, sol.primal, 1e-12);
}

std::string verdict_to_json(const MembershipVerdict& v) {
  nlohmann::ordered_json j;
  j["member"] = v.member;
  j["method"] = v.method;
  if (v.certificate) {
    auto arr = nlohmann::ordered_json::array();
    for (size_t i = 0; i < v.certificate->vertices.size(); ++i) {
      nlohmann::ordered_json atom;
      atom["bits"] = v.certificate->vertices[i].to_string();
      atom["weight"] = v.certificate->weights[i];
      arr.push_back(std::move(atom));
    }
    j["certificate"] = std::move(arr);
  }
  if (v.farkas_ray) j["farkas"] = *v.farkas_ray;
  if (v.distance) j["distance"] = *v.distance;
  return j.dump(2);
}

}  // namespace tdm
