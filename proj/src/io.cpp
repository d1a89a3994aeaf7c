// Copyright The riesz-osc Authors
// SPDX-License-Identifier: Apache-2.0

#include "riesz_osc/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

namespace riesz_osc::io {

namespace {

template <class T>
T field(const json& j, const char* key) {
  if (!j.contains(key)) throw Error(std::string("certificate is missing '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw Error(std::string("certificate field '") + key + "': " + e.what());
  }
}

std::string region_label(const bounds::RegionHit* hit) {
  if (!hit) return "untested";
  if (!hit->inside) return "outside";
  if (hit->component == 0) return "rectangle";
  return "disk_" + std::to_string(hit->component);
}

}  // namespace

json complex_to_json(cplx z) { return json::array({z.real(), z.imag()}); }

cplx complex_from_json(const json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (!j.is_array() || j.size() != 2) throw Error("complex numbers are written [re, im]");
  return {j[0].get<double>(), j[1].get<double>()};
}

json model_to_json(const OscillatorModel& m) {
  if (m.hermite_basis()) return {{"kind", "harmonic"}};
  return {{"kind", "table"}, {"mu", m.table_values()}, {"tail_gap", m.tail_gap()}};
}

OscillatorModel model_from_json(const json& j) {
  const auto kind = j.value("kind", std::string("harmonic"));
  if (kind == "harmonic") return OscillatorModel::harmonic();
  if (kind == "table") return OscillatorModel::table(j.at("mu").get<std::vector<double>>(), j.at("tail_gap").get<double>());
  throw Error("unknown model kind '" + kind + "'");
}

json fit_to_json(const forms::EnvelopeFit& fit) {
  json c = json::array();
  for (const auto& a : fit.candidates)
    c.push_back({{"alpha", a.alpha},
                 {"M_full", a.M_full},
                 {"M_half", a.M_half},
                 {"M_quarter", a.M_quarter},
                 {"admissible", a.admissible},
                 {"from_regression", a.from_regression}});
  return {{"M_b", fit.M_b},
          {"alpha", fit.alpha},
          {"max_residual", fit.max_residual},
          {"grid_size", fit.grid_size},
          {"growth", fit.growth},
          {"candidates", c}};
}

json certificate_to_json(const bounds::EnclosureCertificate& cert) {
  json audit = json::array();
  for (const auto& p : cert.boundary_audit) audit.push_back({{"re", p.z.real()}, {"im", p.z.imag()}, {"bound", p.bound}});
  return {{"M_b", cert.M_b},       {"alpha", cert.alpha},
          {"N", cert.N},           {"h", cert.h},
          {"right_edge", cert.right_edge},
          {"model", model_to_json(cert.model)},
          {"audit_max", cert.audit_max},
          {"boundary_audit", audit}};
}

bounds::EnclosureCertificate certificate_from_json(const json& j) {
  bounds::EnclosureCertificate c;
  c.M_b = field<double>(j, "M_b");
  c.alpha = field<double>(j, "alpha");
  c.N = field<std::size_t>(j, "N");
  c.h = field<double>(j, "h");
  c.right_edge = field<double>(j, "right_edge");
  try {
    c.model = model_from_json(field<json>(j, "model"));
  } catch (const json::exception& e) {
    throw Error(std::string("malformed model: ") + e.what());
  }
  c.audit_max = field<double>(j, "audit_max");
  try {
    for (const auto& p : field<json>(j, "boundary_audit"))
      c.boundary_audit.push_back(
          {cplx(p.at("re").get<double>(), p.at("im").get<double>()), p.at("bound").get<double>()});
  } catch (const json::exception& e) {
    throw Error(std::string("malformed boundary_audit entry: ") + e.what());
  }
  return c;
}

json spectrum_summary(const spectral::SpectralResult& r) {
  json s = {{"K", r.K}, {"trusted", r.trusted_count()}};
  if (r.certificate) {
    json disks = json::object();
    for (std::size_t k = r.certificate->N + 2; k < r.disk_count.size(); ++k)
      if (r.disk_count[k] != 1) disks[std::to_string(k)] = r.disk_count[k];
    s["rectangle_count"] = r.rectangle_count;
    s["expected_rectangle_count"] = r.certificate->N + 1;
    s["disks_not_singly_occupied"] = disks;
    s["outside"] = r.outside;
  }
  return s;
}

json audit_to_json(const spectral::BAudit& a) {
  return {{"passed", a.passed},
          {"max_bound", a.max_bound},
          {"worst_point", complex_to_json(a.worst_point)},
          {"worst_block_estimate", a.worst_block_estimate},
          {"interior_max", a.interior_max},
          {"points", a.points.size()}};
}

json kato_to_json(const spectral::KatoReport& k) {
  json terms = json::array();
  for (const auto& t : k.per_n)
    terms.push_back({{"n", t.n}, {"row_norm_sq", t.row_norm_sq}, {"sampled_mean", t.sampled_mean}});
  return {{"N_star", k.N_star},
          {"n_max", k.n_max},
          {"c0_estimate", k.c0_estimate},
          {"c0_operator", k.c0_operator},
          {"c0_sampled", k.c0_sampled},
          {"sample_count", k.sample_count},
          {"per_n", terms}};
}

json decay_to_json(const spectral::DecayFit& d) {
  json j = {{"log_corrected", d.log_corrected}, {"degenerate_zero", d.degenerate_zero}, {"points", d.points},
            {"n_lo", d.n_lo},                   {"n_hi", d.n_hi}};
  if (!d.degenerate_zero) {
    j["exponent"] = d.exponent;
    j["intercept"] = d.intercept;
    j["residual"] = d.residual;
  }
  return j;
}

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

void write_eigenvalues_csv(std::ostream& out, const spectral::SpectralResult& r) {
  out << "n,re_lambda,im_lambda,converged,region,dist_to_mu\n";
  for (std::size_t n = 1; n <= r.K; ++n) {
    const cplx l = r.eigenvalues[n - 1];
    const bounds::RegionHit* hit = nullptr;
    if (!r.membership.empty() && r.membership[n - 1]) hit = &*r.membership[n - 1];
    out << n << ',' << format_double(l.real()) << ',' << format_double(l.imag()) << ','
        << (r.trusted[n - 1] ? 1 : 0) << ',' << region_label(hit) << ',' << format_double(std::abs(l - r.mu[n - 1]))
        << '\n';
  }
}

void write_growth_csv(std::ostream& out, const spectral::GrowthReport& g) {
  out << "n,sqrt_n,log_norm\n";
  for (const auto& row : g.rows)
    out << row.n << ',' << format_double(row.sqrt_n) << ',' << format_double(row.log_norm) << '\n';
}

void write_file_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw Error("cannot write " + tmp.string());
    f << content;
    f.flush();
    if (!f) throw Error("write failed for " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) throw Error("cannot rename " + tmp.string() + " to " + path + ": " + ec.message());
}

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error("cannot read " + path);
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

}  // namespace riesz_osc::io
