// Copyright The riesz-osc Authors
// SPDX-License-Identifier: Apache-2.0

// Command-line front end: bounds, spectrum, diagnose, verify.
//
// Exit codes: 0 pass, 1 other error, 2 the form has no usable envelope,
// 3 a trusted eigenvalue escapes the enclosure, 4 certificate failure.

#include <CLI11.hpp>
#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fmt/format.h>
#include <numeric>
#include <optional>
#include <random>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>
#include <sstream>

#include "riesz_osc/bounds.hpp"
#include "riesz_osc/config.hpp"
#include "riesz_osc/forms.hpp"
#include "riesz_osc/io.hpp"
#include "riesz_osc/kernels.hpp"
#include "riesz_osc/spectral.hpp"
#include "riesz_osc/version.hpp"

namespace ro = riesz_osc;
using ro::io::json;

namespace {

enum Exit : int { kPass = 0, kOther = 1, kHypothesis = 2, kMembership = 3, kCertificate = 4 };

struct Flags {
  std::string config;
  std::string out;
  std::string certificate;
  std::size_t K = 0;
  int threads = 0;
  std::optional<std::uint64_t> seed;
};

// A failure that maps onto one of the documented exit codes.
struct Failure {
  int code;
  std::string message;
};

class Stopwatch {
 public:
  void lap(const std::string& stage) {
    const auto now = std::chrono::steady_clock::now();
    timings_[stage] = std::chrono::duration<double>(now - last_).count();
    last_ = now;
  }
  const json& timings() const { return timings_; }

 private:
  std::chrono::steady_clock::time_point last_ = std::chrono::steady_clock::now();
  json timings_ = json::object();
};

struct Context {
  ro::config::RunConfig cfg;
  std::string out_dir;
  Stopwatch clock;
  json checks = json::object();
};

Context load(const Flags& f) {
  Context c;
  c.cfg = ro::config::load_config(f.config);
  if (f.K != 0) {
    if (f.K < 8) throw ro::Error("--K must be at least 8");
    c.cfg.pipeline.K = f.K;
  }
  if (f.seed) c.cfg.pipeline.seed = *f.seed;
  c.out_dir = f.out.empty() ? c.cfg.out_dir : f.out;
  if (f.threads > 0) ro::kernels::set_threads(f.threads);
  spdlog::debug("form {}, model {}", c.cfg.form.describe(), ro::io::model_to_json(c.cfg.model).dump());
  return c;
}

std::string out_path(const Context& c, const std::string& name) {
  return (std::filesystem::path(c.out_dir) / name).string();
}

void write_json(const Context& c, const std::string& name, const json& j) {
  ro::io::write_file_atomic(out_path(c, name), j.dump(2) + "\n");
}

void write_manifest(Context& c, const std::string& command, int code) {
  json m = {{"command", command},
            {"version", ro::kVersion},
            {"config_hash", ro::config::config_hash(c.cfg.source)},
            {"threads", ro::kernels::max_threads()},
            {"timings_s", c.clock.timings()},
            {"checks", c.checks},
            {"exit_code", code}};
  write_json(c, "manifest.json", m);
}

ro::forms::EnvelopeFit envelope(const Context& c) {
  if (const auto* raw = std::get_if<ro::forms::RawMatrix>(&c.cfg.form.kind)) return ro::forms::declared_envelope(*raw);
  return ro::forms::fit_envelope(c.cfg.form, c.cfg.model, c.cfg.pipeline.fit_grid);
}

// The envelope and enclosure certificate; a missing envelope or one too weak to
// give a finite N is a hypothesis failure.
std::pair<ro::forms::EnvelopeFit, ro::bounds::EnclosureCertificate> certify(Context& c) {
  try {
    auto fit = envelope(c);
    c.clock.lap("envelope");
    spdlog::info("envelope M_b = {:.6g}, alpha = {:.6g}", fit.M_b, fit.alpha);
    auto cert = ro::bounds::certify_enclosure(fit, c.cfg.model);
    c.clock.lap("enclosure");
    return {fit, cert};
  } catch (const ro::EnvelopeError& e) {
    throw Failure{kHypothesis, e.what()};
  } catch (const ro::SearchLimitError& e) {
    throw Failure{kHypothesis, e.what()};
  }
}

ro::spectral::SpectrumOptions spectrum_options(const Context& c) {
  ro::spectral::SpectrumOptions o;
  o.trust_tol = c.cfg.pipeline.trust_tol.value_or(ro::spectral::default_trust_tol(c.cfg.form));
  o.max_roundoff = c.cfg.pipeline.max_roundoff;
  return o;
}

std::size_t truncation(const Context& c, std::size_t N) {
  return c.cfg.pipeline.K != 0 ? c.cfg.pipeline.K : ro::spectral::default_K(N);
}

std::string complex_str(ro::cplx z) { return fmt::format("{:.10g}{:+.10g}i", z.real(), z.imag()); }

// ---------------------------------------------------------------------------

int cmd_bounds(Context& c) {
  const auto [fit, cert] = certify(c);
  json doc = ro::io::certificate_to_json(cert);
  doc["form"] = c.cfg.form.describe();
  doc["fit"] = ro::io::fit_to_json(fit);
  write_json(c, "certificate.json", doc);
  fmt::print("M_b = {:.10g}\nalpha = {:.10g}\nN = {}\nh = {:.10g}\nright_edge = {:.10g}\naudit_max = {:.6g}\n", cert.M_b,
             cert.alpha, cert.N, cert.h, cert.right_edge, cert.audit_max);
  c.checks["boundary_audit"] = cert.audit_passed();
  if (!cert.audit_passed()) throw Failure{kCertificate, fmt::format("boundary audit exceeds 1/2: {}", cert.audit_max)};
  return kPass;
}

std::optional<ro::bounds::EnclosureCertificate> certificate_for(Context& c, const Flags& f) {
  if (!f.certificate.empty()) {
    try {
      return ro::io::certificate_from_json(json::parse(ro::io::read_file(f.certificate)));
    } catch (const json::parse_error& e) {
      throw ro::Error("cannot parse " + f.certificate + ": " + e.what());
    }
  }
  try {
    return certify(c).second;
  } catch (const Failure& e) {
    spdlog::warn("no certificate ({}); membership is not tested", e.message);
    return std::nullopt;
  }
}

int cmd_spectrum(Context& c, const Flags& f) {
  const auto cert = certificate_for(c, f);
  const std::size_t K = truncation(c, cert ? cert->N : 0);
  const auto op = ro::spectral::assemble(c.cfg.model, c.cfg.form, K);
  c.clock.lap("assemble");
  const auto r = ro::spectral::compute_spectrum(op, cert, spectrum_options(c));
  c.clock.lap("spectrum");

  std::ostringstream csv;
  ro::io::write_eigenvalues_csv(csv, r);
  ro::io::write_file_atomic(out_path(c, "eigenvalues.csv"), csv.str());
  write_json(c, "spectrum.json", ro::io::spectrum_summary(r));

  fmt::print("K = {}\ntrusted = {} of {}\n", K, r.trusted_count(), K / 2);
  if (2 * r.trusted_count() <= K / 2)
    spdlog::warn("only {} of {} half-spectrum eigenvalues are trusted; increase K", r.trusted_count(), K / 2);
  if (!cert) return kPass;
  if (K / 2 < cert->N + 1) spdlog::warn("K / 2 = {} does not reach N + 1 = {}; increase K", K / 2, cert->N + 1);

  fmt::print("rectangle = {} (N + 1 = {})\n", r.rectangle_count, cert->N + 1);
  std::vector<std::string> offenders;
  for (std::size_t n : r.outside)
    offenders.push_back(fmt::format("lambda_{} = {} lies outside the enclosure", n, complex_str(r.eigenvalues[n - 1])));
  std::size_t empty = 0;
  for (std::size_t k : r.disk_occupancy_failures()) {
    if (r.disk_count[k] > 1)
      offenders.push_back(fmt::format("disk around mu_{} holds {} eigenvalues", k, r.disk_count[k]));
    else
      ++empty;
  }
  if (empty > 0) spdlog::warn("{} disks hold no trusted eigenvalue", empty);
  c.checks["membership"] = offenders.empty();
  if (!offenders.empty()) {
    std::string msg = "membership violations:";
    for (const auto& o : offenders) msg += "\n  " + o;
    throw Failure{kMembership, msg};
  }
  fmt::print("membership: pass\n");
  return kPass;
}

// The longest run of consecutive trusted indices starting at or after `first`,
// within the half spectrum.
std::pair<std::size_t, std::size_t> trusted_run(const ro::spectral::SpectralResult& r, std::size_t first) {
  std::pair<std::size_t, std::size_t> best{0, 0};
  std::size_t start = 0;
  for (std::size_t n = first; n <= r.K / 2 + 1; ++n) {
    const bool ok = n <= r.K / 2 && r.trusted[n - 1];
    if (ok && start == 0) start = n;
    if (!ok && start != 0) {
      if (n - start > best.second + 1 - best.first || best.first == 0) best = {start, n - 1};
      start = 0;
    }
  }
  return best;
}

int cmd_diagnose(Context& c) {
  std::optional<ro::forms::EnvelopeFit> fit;
  std::optional<ro::bounds::EnclosureCertificate> cert;
  try {
    auto fc = certify(c);
    fit = fc.first;
    cert = fc.second;
  } catch (const Failure& e) {
    spdlog::warn("{}; continuing with N = 0", e.message);
  }
  const std::size_t N = cert ? cert->N : 0;
  const std::size_t K = truncation(c, N);
  const auto op = ro::spectral::assemble(c.cfg.model, c.cfg.form, K);
  const auto r = ro::spectral::compute_spectrum(op, cert, spectrum_options(c));
  c.clock.lap("spectrum");

  json report = json::object();
  report["K"] = K;
  report["N"] = N;
  const auto eig = ro::spectral::projections_eigvec(r, N, &op);
  report["S_rank"] = eig.S_rank;
  report["S_members"] = eig.S_members.size();
  c.clock.lap("projections_eigvec");

  // Contour route on a seeded random subset of the eigenvector-route indices.
  std::vector<std::size_t> pick(eig.projections.size());
  std::iota(pick.begin(), pick.end(), std::size_t{0});
  std::mt19937_64 rng(c.cfg.pipeline.seed);
  std::shuffle(pick.begin(), pick.end(), rng);
  pick.resize(std::min(pick.size(), c.cfg.pipeline.contour_indices));
  std::sort(pick.begin(), pick.end());
  std::vector<ro::spectral::Circle> circles;
  for (std::size_t i : pick) {
    const auto& p = eig.projections[i];
    double gap = 1.0;
    for (std::size_t m = 0; m < K; ++m)
      if (m + 1 != p.n) gap = std::min(gap, std::abs(r.eigenvalues[m] - p.lambda));
    circles.push_back({p.n, p.lambda, 0.5 * gap});
  }
  std::optional<ro::spectral::ProjectionSet> con;
  double route_diff = 0.0;
  if (!circles.empty()) {
    con = ro::spectral::projections_contour(op, circles, c.cfg.pipeline.contour_nodes);
    for (const auto& q : con->projections)
      route_diff = std::max(route_diff, ro::linalg::operator_norm(q.matrix - eig.find(q.n)->dense(K)));
    report["route_agreement"] = {{"indices", circles.size()}, {"max_difference", route_diff}};
  }
  c.clock.lap("projections_contour");

  try {
    const auto kato = ro::spectral::find_kato_N_star(eig, K / 4, c.cfg.pipeline.kato_samples, 0.5,
                                                     c.cfg.pipeline.seed);
    report["kato"] = ro::io::kato_to_json(kato);
    fmt::print("kato: N_star = {}, c0 = {:.6g}\n", kato.N_star, kato.c0_estimate);
  } catch (const ro::Error& e) {
    report["kato"] = {{"error", e.what()}};
    spdlog::warn("kato check skipped: {}", e.what());
  }
  c.clock.lap("kato");

  std::pair<std::size_t, std::size_t> range;
  if (c.cfg.pipeline.growth_range)
    range = *c.cfg.pipeline.growth_range;
  else
    range = trusted_run(r, std::max<std::size_t>(N + 2, 2));
  ro::spectral::GrowthReport growth;
  if (range.first != 0 && range.second > range.first) {
    try {
      const auto g = ro::spectral::projection_growth(r, range.first, range.second);
      growth = g;
      report["growth"] = {{"n_lo", range.first}, {"n_hi", range.second}, {"slope", g.slope}, {"intercept", g.intercept}};
      fmt::print("growth slope over [{}, {}] = {:.6g}\n", range.first, range.second, g.slope);
    } catch (const ro::UntrustedIndexError& e) {
      report["growth"] = {{"error", e.what()}};
      spdlog::warn("{}", e.what());
    }
  } else {
    spdlog::warn("no run of two or more trusted indices for the growth fit");
  }
  {
    std::ostringstream csv;
    ro::io::write_growth_csv(csv, growth);
    ro::io::write_file_atomic(out_path(c, "growth.csv"), csv.str());
  }

  if (fit) {
    try {
      report["decay"] = ro::io::decay_to_json(ro::spectral::radius_decay_fit(r, *fit, N + 1));
    } catch (const ro::Error& e) {
      report["decay"] = {{"error", e.what()}};
    }
  }
  c.clock.lap("fits");

  std::ostringstream csv;
  csv << "n,re_lambda,im_lambda,norm_eigvec,norm_contour,route_difference\n";
  for (const auto& p : eig.projections) {
    csv << p.n << ',' << ro::io::format_double(p.lambda.real()) << ',' << ro::io::format_double(p.lambda.imag())
        << ',' << ro::io::format_double(p.norm) << ',';
    const auto* q = con ? con->find(p.n) : nullptr;
    if (q)
      csv << ro::io::format_double(q->norm) << ','
          << ro::io::format_double(ro::linalg::operator_norm(q->matrix - p.dense(K)));
    else
      csv << ',';
    csv << '\n';
  }
  ro::io::write_file_atomic(out_path(c, "projections.csv"), csv.str());
  write_json(c, "kato.json", report);
  fmt::print("S rank = {} of {}\n", eig.S_rank, N + 1);
  if (con) fmt::print("route agreement: {:.3g} over {} indices\n", route_diff, circles.size());
  return kPass;
}

int cmd_verify(Context& c, const Flags& f) {
  if (f.certificate.empty()) throw ro::Error("verify needs --certificate");
  ro::bounds::EnclosureCertificate cert;
  try {
    cert = ro::io::certificate_from_json(json::parse(ro::io::read_file(f.certificate)));
  } catch (const json::parse_error& e) {
    throw Failure{kCertificate, "cannot parse " + f.certificate + ": " + e.what()};
  } catch (const ro::Error& e) {
    throw Failure{kCertificate, e.what()};
  }

  auto failures = ro::bounds::verify_certificate(cert);
  if (ro::io::model_to_json(cert.model) != ro::io::model_to_json(c.cfg.model))
    failures.push_back("certificate was issued for a different oscillator model");

  // The configured form must sit under the certificate's envelope.
  const std::size_t G = c.cfg.pipeline.fit_grid;
  const auto block = ro::forms::matrix_block(c.cfg.form, c.cfg.model, G);
  const double alphas[] = {cert.alpha};
  const std::size_t sizes[] = {G};
  const double M = ro::kernels::weighted_max(block, alphas, sizes, ro::kernels::default_backend())[0][0];
  if (M > cert.M_b * (1.0 + 1e-9))
    failures.push_back(fmt::format("form needs M_b >= {:.10g} at alpha = {:.6g}, certificate has {:.10g}", M,
                                   cert.alpha, cert.M_b));
  c.clock.lap("verify_certificate");

  if (!failures.empty()) {
    std::string msg = "certificate rejected:";
    for (const auto& s : failures) msg += "\n  " + s;
    c.checks["certificate"] = false;
    throw Failure{kCertificate, msg};
  }

  ro::spectral::BAuditOptions opts;
  opts.samples_per_arc = c.cfg.pipeline.samples_per_arc;
  const auto op = ro::spectral::assemble(c.cfg.model, c.cfg.form, truncation(c, cert.N));
  const auto audit = ro::spectral::certify_B_bound(op, cert, opts);
  c.clock.lap("b_audit");
  write_json(c, "verify.json", ro::io::audit_to_json(audit));
  c.checks["b_audit"] = audit.passed;
  fmt::print("max ||B(z)|| bound = {:.6g} at z = {}\n", audit.max_bound, complex_str(audit.worst_point));
  if (!audit.passed)
    throw Failure{kCertificate, fmt::format("||B(z)|| bound {:.6g} > 1/2 at z = {}", audit.max_bound,
                                            complex_str(audit.worst_point))};
  fmt::print("certificate: pass\n");
  return kPass;
}

void init_logging() {
  auto logger = spdlog::stderr_color_mt("riesz_osc");
  spdlog::set_default_logger(logger);
  spdlog::set_pattern("[%l] %v");
  const char* level = std::getenv("RIESZ_OSC_LOG");
  spdlog::set_level(level ? spdlog::level::from_str(level) : spdlog::level::warn);
}

}  // namespace

int main(int argc, char** argv) {
  init_logging();
  CLI::App app{"Spectral enclosures and Riesz-basis diagnostics for perturbed oscillators"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(ro::kVersion));

  Flags flags;
  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", flags.config, "run configuration (JSON)")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", flags.out, "output directory (overrides output.dir)");
    sub->add_option("--K", flags.K, "truncation size (overrides pipeline.K)");
    sub->add_option("--threads", flags.threads, "worker thread bound");
    sub->add_option("--seed", flags.seed, "seed for sampled routes (overrides pipeline.seed)");
  };
  auto* bounds = app.add_subcommand("bounds", "fit the envelope and write certificate.json");
  auto* spectrum = app.add_subcommand("spectrum", "eigenvalues and enclosure membership");
  auto* diagnose = app.add_subcommand("diagnose", "projections, Kato check, growth and decay fits");
  auto* verify = app.add_subcommand("verify", "re-check a stored certificate against a form");
  for (auto* s : {bounds, spectrum, diagnose, verify}) common(s);
  spectrum->add_option("--certificate", flags.certificate, "use this certificate instead of computing one");
  verify->add_option("--certificate", flags.certificate, "certificate to check")->required();

  CLI11_PARSE(app, argc, argv);

  std::optional<Context> ctx;
  std::string command = app.get_subcommands().front()->get_name();
  int code = kPass;
  try {
    ctx.emplace(load(flags));
    if (command == "bounds")
      code = cmd_bounds(*ctx);
    else if (command == "spectrum")
      code = cmd_spectrum(*ctx, flags);
    else if (command == "diagnose")
      code = cmd_diagnose(*ctx);
    else
      code = cmd_verify(*ctx, flags);
  } catch (const Failure& f) {
    fmt::print(stderr, "{}\n", f.message);
    code = f.code;
  } catch (const ro::EnvelopeError& e) {
    fmt::print(stderr, "{}\n", e.what());
    code = kHypothesis;
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    code = kOther;
  }
  if (ctx) {
    try {
      write_manifest(*ctx, command, code);
    } catch (const std::exception& e) {
      fmt::print(stderr, "error: cannot write manifest: {}\n", e.what());
      if (code == kPass) code = kOther;
    }
  }
  return code;
}
