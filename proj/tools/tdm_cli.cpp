#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "tdm/decide.hpp"
#include "tdm/errors.hpp"
#include "tdm/io.hpp"
#include "tdm/parametric.hpp"
#include "tdm/stochastic.hpp"

namespace {

using nlohmann::ordered_json;
using Clock = std::chrono::steady_clock;

double elapsed_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fnv1a_hex(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  std::ostringstream os;
  os << std::hex << h;
  return os.str();
}

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    size_t pos = 0;
    double v = std::stod(tok, &pos);
    if (pos != tok.size()) throw CLI::ValidationError("numbers", "bad entry '" + tok + "'");
    out.push_back(v);
  }
  if (out.empty()) throw CLI::ValidationError("numbers", "empty list");
  return out;
}

double global_tolerance() {
  if (const char* env = std::getenv("TDM_TOLERANCE")) {
    char* end = nullptr;
    double v = std::strtod(env, &end);
    if (end == env || *end != '\0' || !(v > 0.0)) {
      std::cerr << "TDM_TOLERANCE must be a positive number\n";
      std::exit(1);
    }
    return v;
  }
  return tdm::kTol;
}

ordered_json verdict_json(const tdm::Decision& dec) {
  ordered_json j;
  if (!dec.violations.empty()) {
    j["member"] = false;
    j["path"] = dec.verdict.method;
    ordered_json viols = ordered_json::array();
    for (const auto& v : dec.violations) {
      ordered_json one;
      one["code"] = tdm::errc_name(v.code);
      one["detail"] = v.detail;
      viols.push_back(one);
    }
    j["violations"] = viols;
    return j;
  }
  if (!dec.decided) {
    j["undecided"] = true;
    j["lower_bound"] = dec.lower_bound;
    j["upper_bound"] = dec.upper_bound;
    return j;
  }
  const auto& v = dec.verdict;
  j["member"] = v.member;
  j["path"] = v.method;
  if (v.distance) j["distance"] = *v.distance;
  if (v.certificate) j["certificate_support"] = v.certificate->vertices.size();
  if (v.farkas_ray) j["farkas_ray"] = *v.farkas_ray;
  return j;
}

struct ExitTally {
  std::atomic<int> errors{0};
  std::atomic<int> undecided{0};
  std::atomic<int> decided{0};

  int code() const {
    if (errors > 0) return 1;
    if (undecided > 0) return 2;
    return 0;
  }
};

void emit_report(ordered_json& report, const ordered_json& config, Clock::time_point t0) {
  report["config_hash"] = fnv1a_hex(config.dump());
  report["total_seconds"] = elapsed_since(t0);
  std::cout << report.dump(2) << '\n';
}

int run_check(const std::vector<std::string>& files, const std::string& mode_name,
              const std::string& method_name, int jobs) {
  const auto t0 = Clock::now();
  const double tol = global_tolerance();
  tdm::DecideOptions opts;
  opts.tol = tol;
  opts.mode = mode_name == "bcm" ? tdm::Mode::Bcm : tdm::Mode::Tdm;
  if (method_name == "full")
    opts.method = tdm::Method::Full;
  else if (method_name == "colgen")
    opts.method = tdm::Method::Colgen;
  else if (method_name == "symmetric")
    opts.method = tdm::Method::Symmetric;
  else
    opts.method = tdm::Method::Auto;

  ExitTally tally;
  std::vector<ordered_json> instances(files.size());
  std::atomic<size_t> cursor{0};
  auto worker = [&]() {
    for (;;) {
      const size_t k = cursor.fetch_add(1);
      if (k >= files.size()) return;
      const auto ti = Clock::now();
      ordered_json inst;
      inst["file"] = files[k];
      try {
        tdm::CandidateMatrix m = tdm::read_matrix_file(files[k]);
        inst["d"] = m.d;
        tdm::Decision dec = tdm::decide_matrix(m, opts);
        ordered_json v = verdict_json(dec);
        inst.update(v);
        if (!dec.decided)
          ++tally.undecided;
        else
          ++tally.decided;
      } catch (const tdm::Error& e) {
        inst["error"] = e.what();
        inst["error_code"] = tdm::errc_name(e.code());
        ++tally.errors;
      } catch (const std::exception& e) {
        inst["error"] = e.what();
        ++tally.errors;
      }
      inst["seconds"] = elapsed_since(ti);
      instances[k] = std::move(inst);
    }
  };
  const int n_threads = std::max(1, std::min<int>(jobs, static_cast<int>(files.size())));
  std::vector<std::thread> pool;
  for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  ordered_json config;
  config["mode"] = mode_name;
  config["method"] = method_name;
  config["tolerance"] = tol;
  config["files"] = files;

  ordered_json report;
  report["command"] = "check";
  report["config"] = config;
  report["instances"] = instances;
  report["summary"] = {{"decided", tally.decided.load()},
                       {"undecided", tally.undecided.load()},
                       {"errors", tally.errors.load()}};

  for (const auto& inst : instances) {
    std::cerr << "[check] " << inst["file"].get<std::string>() << ": ";
    if (inst.contains("error"))
      std::cerr << "error (" << inst["error"].get<std::string>() << ")";
    else if (inst.contains("undecided"))
      std::cerr << "undecided, distance in [" << inst["lower_bound"].get<double>() << ", "
                << inst["upper_bound"].get<double>() << "]";
    else
      std::cerr << (inst["member"].get<bool>() ? "member" : "non-member") << " via "
                << inst["path"].get<std::string>();
    std::cerr << '\n';
  }
  emit_report(report, config, t0);
  return tally.code();
}

int run_gen(const std::string& klass, int d, int count, std::uint64_t seed,
            const std::string& out_dir) {
  const auto t0 = Clock::now();
  const double tol = global_tolerance();
  ExitTally tally;
  ordered_json instances = ordered_json::array();
  for (int k = 0; k < count; ++k) {
    const std::uint64_t s = seed + static_cast<std::uint64_t>(k);
    tdm::GeneratedInstance gi =
        klass == "class3" ? tdm::gen_class3(d, s) : tdm::gen_class5(d, s);
    std::ostringstream name;
    name << out_dir << '/' << klass << "_d" << d << "_s" << seed << '_' << k << ".json";
    tdm::write_matrix_file(name.str(), gi.matrix);

    ordered_json inst;
    inst["file"] = name.str();
    inst["seed"] = s;
    inst["generator_atoms"] = gi.generator.vertices.size();
    inst["in_range"] = gi.in_range;
    tdm::ValidationResult vr = tdm::validate(gi.matrix, tdm::Mode::Bcm, tol);
    inst["valid_bcm"] = vr.ok();
    if (klass == "class3" && vr.ok()) {
      tdm::VerifyReport rep = tdm::verify_certificate(*vr.value, gi.generator, tol * 100);
      inst["member"] = rep.ok;
      inst["path"] = "generator";
      inst["reconstruction_residual"] = rep.residual;
      ++tally.decided;
    } else {
      tdm::DecideOptions opts;
      opts.mode = tdm::Mode::Bcm;
      opts.tol = tol;
      tdm::Decision dec = tdm::decide_matrix(gi.matrix, opts);
      inst.update(verdict_json(dec));
      if (dec.decided)
        ++tally.decided;
      else
        ++tally.undecided;
    }
    instances.push_back(inst);
    std::cerr << "[gen] " << name.str() << '\n';
  }

  ordered_json config;
  config["class"] = klass;
  config["d"] = d;
  config["count"] = count;
  config["seed"] = seed;
  config["out_dir"] = out_dir;

  ordered_json report;
  report["command"] = "gen";
  report["config"] = config;
  report["instances"] = instances;
  emit_report(report, config, t0);
  return tally.code();
}

int run_simulate(const std::string& process, double phi, double a, double b, double c, long n,
                 int d, long burn_in, std::uint64_t seed, double u, const std::string& out,
                 bool no_csv) {
  const auto t0 = Clock::now();
  tdm::SimConfig cfg;
  cfg.n = n;
  cfg.dim = d;
  cfg.burn_in = burn_in;
  cfg.seed = seed;

  tdm::SampleMatrix samples = process == "ar1max" ? tdm::simulate_ar1_max(phi, cfg)
                                                  : tdm::simulate_two_dependent(a, b, c, cfg);
  std::string csv_path;
  if (!no_csv) {
    csv_path = out.empty() ? process + "_samples.csv" : out;
    tdm::write_samples_csv(samples, csv_path);
  }

  ordered_json lags = ordered_json::array();
  for (int k = 1; k < d; ++k) {
    tdm::TdcEstimate est = tdm::empirical_tdc(samples, 0, k, u);
    double expect = process == "ar1max"
                        ? std::pow(phi, k)
                        : (k == 1 ? std::min(a, b) + std::min(b, c)
                                  : (k == 2 ? std::min(a, c) : 0.0));
    ordered_json row;
    row["lag"] = k;
    row["tdc"] = est.value;
    row["se"] = est.se;
    row["exceedances"] = est.exceedances;
    row["expected"] = expect;
    lags.push_back(row);
    std::cerr << "[simulate] lag " << k << ": tdc = " << est.value << " (se " << est.se
              << "), expected " << expect << '\n';
  }

  ordered_json config;
  config["process"] = process;
  if (process == "ar1max") {
    config["phi"] = phi;
  } else {
    config["a"] = a;
    config["b"] = b;
    config["c"] = c;
  }
  config["n"] = n;
  config["d"] = d;
  config["burn_in"] = burn_in;
  config["seed"] = seed;
  config["u"] = u;

  ordered_json report;
  report["command"] = "simulate";
  report["config"] = config;
  if (!csv_path.empty()) report["samples_csv"] = csv_path;
  report["lags"] = lags;
  emit_report(report, config, t0);
  return 0;
}

int run_parametric(ordered_json config, ordered_json values) {
  ordered_json report;
  report["command"] = "parametric";
  report["config"] = config;
  report["values"] = std::move(values);
  emit_report(report, config, Clock::now());
  return 0;
}

double witness_residual(const tdm::AtomVector& atoms, const tdm::CandidateMatrix& scaled) {
  tdm::CandidateMatrix rec = atoms.induced_matrix();
  double r = 0.0;
  for (int i = 0; i < scaled.d; ++i)
    for (int j = 0; j < scaled.d; ++j) r = std::max(r, std::abs(rec.at(i, j) - scaled.at(i, j)));
  return r;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"tail dependence and Bernoulli compatibility toolkit"};
  app.require_subcommand(1);

  // check
  auto* check = app.add_subcommand("check", "decide membership for matrix files");
  std::vector<std::string> files;
  std::string mode = "tdm", method = "auto";
  int jobs = 1;
  check->add_option("files", files, "matrix files (JSON or CSV)")->required()->expected(-1);
  check->add_option("--mode", mode)->check(CLI::IsMember({"tdm", "bcm"}));
  check->add_option("--method", method)->check(CLI::IsMember({"full", "colgen", "symmetric", "auto"}));
  check->add_option("--jobs", jobs, "worker threads across input files")->check(CLI::PositiveNumber);

  // parametric
  auto* par = app.add_subcommand("parametric", "closed-form families");
  par->require_subcommand(1);
  double p_alpha = 0.0, p_beta = 0.0, p_gamma = 0.0;
  int p_d = 2, p_d1 = 1, p_d2 = 1, p_grid = 0;
  std::string p_list, p_betas, p_out;
  bool has_beta = false, has_gamma = false;

  auto* equi = par->add_subcommand("equi", "constant off-diagonal family");
  equi->add_option("--alpha", p_alpha)->required();
  equi->add_option("--d", p_d)->required();
  auto* beta_opt = equi->add_option("--beta", p_beta, "also test the pair (alpha, beta)");

  auto* toep = par->add_subcommand("toeplitz", "banded/Toeplitz family");
  toep->add_option("--alphas", p_list, "comma-separated off-diagonal values")->required();

  auto* twodep = par->add_subcommand("two-dep", "two nonzero off-diagonals");
  twodep->add_option("--alpha", p_alpha)->required();
  twodep->add_option("--beta", p_beta)->required();
  twodep->add_option("--d", p_d)->required();

  auto* cross = par->add_subcommand("cross", "diagonal plus last row/column");
  cross->add_option("--alphas", p_list, "arm entries, d-1 values")->required();
  cross->add_option("--betas", p_betas, "diagonal entries (omit for the unit-diagonal case)");

  auto* twosec = par->add_subcommand("two-sector", "two-block family");
  twosec->add_option("--alpha", p_alpha);
  twosec->add_option("--beta", p_beta);
  twosec->add_option("--d1", p_d1)->required();
  twosec->add_option("--d2", p_d2)->required();
  auto* gamma_opt = twosec->add_option("--gamma", p_gamma, "also test the triple");
  twosec->add_option("--grid", p_grid, "sweep gamma_upper over an n-by-n (alpha,beta) grid");
  twosec->add_option("--out", p_out, "grid CSV path");

  // gen
  auto* gen = app.add_subcommand("gen", "write random instances");
  gen->require_subcommand(1);
  auto* c3 = gen->add_subcommand("class3", "vertex mixtures (always members)");
  auto* c5 = gen->add_subcommand("class5", "rank-one lifted mixtures");
  int g_d = 4, g_count = 1;
  std::uint64_t g_seed = 1;
  std::string g_dir = ".";
  for (auto* g : {c3, c5}) {
    g->add_option("--d", g_d)->required();
    g->add_option("--count", g_count)->check(CLI::PositiveNumber);
    g->add_option("--seed", g_seed);
    g->add_option("--out-dir", g_dir);
  }

  // simulate
  auto* sim = app.add_subcommand("simulate", "sample stationary max-processes");
  sim->require_subcommand(1);
  auto* ar1 = sim->add_subcommand("ar1max", "max-autoregressive path");
  auto* mov = sim->add_subcommand("movmax", "moving maximum of order 2");
  double s_phi = 0.5, s_a = 1.0 / 3, s_b = 1.0 / 3, s_c = 1.0 / 3, s_u = 0.005;
  long s_n = 100000, s_burn = 1000;
  int s_d = 4;
  std::uint64_t s_seed = 1;
  std::string s_out;
  bool s_nocsv = false;
  ar1->add_option("--phi", s_phi)->required();
  mov->add_option("--a", s_a)->required();
  mov->add_option("--b", s_b)->required();
  mov->add_option("--c", s_c)->required();
  for (auto* s : {ar1, mov}) {
    s->add_option("--n", s_n)->check(CLI::PositiveNumber);
    s->add_option("--d", s_d)->check(CLI::PositiveNumber);
    s->add_option("--burn-in", s_burn);
    s->add_option("--seed", s_seed);
    s->add_option("--u", s_u, "tail threshold for the TDC summary");
    s->add_option("--out", s_out, "samples CSV path");
    s->add_flag("--no-csv", s_nocsv, "skip writing samples");
  }

  CLI11_PARSE(app, argc, argv);
  has_beta = beta_opt->count() > 0;
  has_gamma = gamma_opt->count() > 0;

  try {
    if (check->parsed()) return run_check(files, mode, method, jobs);

    if (par->parsed()) {
      ordered_json config, values;
      if (equi->parsed()) {
        config["family"] = "equi";
        config["alpha"] = p_alpha;
        config["d"] = p_d;
        values["beta_lower"] = tdm::equi_beta_lower(p_alpha, p_d);
        values["variance_bound"] = tdm::equi_variance_bound(p_alpha, p_d);
        if (has_beta) {
          config["beta"] = p_beta;
          values["bcm_member"] = tdm::equi_bcm_member({p_alpha, p_beta, p_d});
        }
      } else if (toep->parsed()) {
        tdm::ToeplitzParams tp{parse_list(p_list)};
        config["family"] = "toeplitz";
        config["alphas"] = tp.alphas;
        values["d"] = tp.dim();
        values["sufficient"] = tdm::toeplitz_sufficient(tp);
        if (tdm::toeplitz_sufficient(tp)) {
          tdm::AtomVector w = tdm::toeplitz_witness(tp);
          tdm::CandidateMatrix scaled = tdm::toeplitz_matrix(tp);
          for (double& e : scaled.entries) e /= tp.dim();
          values["witness_atoms"] = w.weights.size();
          values["witness_residual"] = witness_residual(w, scaled);
        }
      } else if (twodep->parsed()) {
        config["family"] = "two-dep";
        config["alpha"] = p_alpha;
        config["beta"] = p_beta;
        config["d"] = p_d;
        bool member = tdm::two_dependence_member(p_alpha, p_beta, p_d);
        values["member"] = member;
        if (member && p_d >= 6) {
          tdm::AtomVector w = tdm::two_dependence_witness(p_alpha, p_beta, p_d);
          tdm::CandidateMatrix scaled = tdm::two_dependence_matrix(p_alpha, p_beta, p_d);
          for (double& e : scaled.entries) e /= p_d;
          values["witness_atoms"] = w.weights.size();
          values["witness_residual"] = witness_residual(w, scaled);
        }
      } else if (cross->parsed()) {
        config["family"] = "cross";
        std::vector<double> arms = parse_list(p_list);
        config["alphas"] = arms;
        if (!p_betas.empty()) {
          tdm::CrossParams cp{parse_list(p_betas), arms};
          config["betas"] = cp.betas;
          values["bcm_member"] = tdm::cross_bcm_member(cp);
        } else {
          values["tdm_member"] = tdm::cross_tdm_member(arms);
        }
      } else {
        config["family"] = "two-sector";
        config["d1"] = p_d1;
        config["d2"] = p_d2;
        if (p_grid > 1) {
          config["grid"] = p_grid;
          std::string path = p_out.empty() ? "two_sector_grid.csv" : p_out;
          std::ofstream csv(path);
          if (!csv) {
            std::cerr << "cannot open " << path << " for writing\n";
            return 1;
          }
          csv.precision(12);
          csv << "alpha,beta,gamma_upper\n";
          std::vector<int> basis;
          for (int i = 0; i < p_grid; ++i) {
            double alpha = static_cast<double>(i) / (p_grid - 1);
            for (int j = 0; j < p_grid; ++j) {
              double beta = static_cast<double>(j) / (p_grid - 1);
              double gu = tdm::two_sector_gamma_upper(alpha, beta, p_d1, p_d2, &basis);
              csv << alpha << ',' << beta << ',' << gu << '\n';
            }
          }
          values["grid_csv"] = path;
          values["rows"] = p_grid * p_grid;
        } else {
          config["alpha"] = p_alpha;
          config["beta"] = p_beta;
          values["gamma_upper"] = tdm::two_sector_gamma_upper(p_alpha, p_beta, p_d1, p_d2);
          if (has_gamma) {
            config["gamma"] = p_gamma;
            values["member"] = tdm::two_sector_member({p_alpha, p_beta, p_gamma, p_d1, p_d2});
          }
        }
      }
      return run_parametric(config, values);
    }

    if (gen->parsed())
      return run_gen(c3->parsed() ? "class3" : "class5", g_d, g_count, g_seed, g_dir);

    if (sim->parsed())
      return run_simulate(ar1->parsed() ? "ar1max" : "movmax", s_phi, s_a, s_b, s_c, s_n, s_d,
                          s_burn, s_seed, s_u, s_out, s_nocsv);
  } catch (const tdm::Error& e) {
    std::cerr << "error [" << tdm::errc_name(e.code()) << "]: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
