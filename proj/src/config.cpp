// Copyright The riesz-osc Authors
// SPDX-License-Identifier: Apache-2.0

#include "riesz_osc/config.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <initializer_list>
#include <string_view>

namespace riesz_osc::config {

namespace {

using io::json;

void only_keys(const json& j, std::string_view where, std::initializer_list<std::string_view> allowed) {
  if (!j.is_object()) throw Error(std::string(where) + " must be a table");
  for (const auto& [key, _] : j.items()) {
    bool ok = false;
    for (auto a : allowed) ok = ok || key == a;
    if (!ok) throw Error("unknown key '" + std::string(where) + "." + key + "'");
  }
}

template <class T>
T get(const json& j, const char* key, std::string_view where) {
  if (!j.contains(key)) throw Error("missing key '" + std::string(where) + "." + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw Error("bad value for '" + std::string(where) + "." + key + "'");
  }
}

template <class T>
T get_or(const json& j, const char* key, std::string_view where, T fallback) {
  return j.contains(key) ? get<T>(j, key, where) : fallback;
}

cplx get_complex(const json& j, const char* key, std::string_view where, cplx fallback = 0.0) {
  if (!j.contains(key)) return fallback;
  try {
    return io::complex_from_json(j.at(key));
  } catch (const std::exception&) {
    throw Error("'" + std::string(where) + "." + key + "' must be a number or [re, im]");
  }
}

std::size_t get_count(const json& j, const char* key, std::string_view where, std::size_t fallback) {
  if (!j.contains(key)) return fallback;
  const auto& v = j.at(key);
  if (!v.is_number_integer() || v.get<long long>() < 0)
    throw Error("'" + std::string(where) + "." + key + "' must be a nonnegative integer");
  return v.get<std::size_t>();
}

OscillatorModel parse_model(const json& j) {
  const auto kind = get_or<std::string>(j, "kind", "model", "harmonic");
  if (kind == "harmonic") {
    only_keys(j, "model", {"kind"});
    return OscillatorModel::harmonic();
  }
  if (kind == "table") {
    only_keys(j, "model", {"kind", "mu", "tail_gap"});
    return OscillatorModel::table(get<std::vector<double>>(j, "mu", "model"), get<double>(j, "tail_gap", "model"));
  }
  throw Error("unknown model kind '" + kind + "'");
}

forms::FunctionPotential parse_potential(const json& j) {
  const auto shape = get<std::string>(j, "shape", "form");
  forms::FunctionPotential f;
  f.p = get_or<double>(j, "p", "form", 0.0);
  f.tau = get_or<double>(j, "tau", "form", 0.0);
  f.tolerance = get_or<double>(j, "tolerance", "form", 1e-10);
  const cplx c = get_complex(j, "coefficient", "form", 1.0);
  if (shape == "abs_power") {
    only_keys(j, "form", {"kind", "shape", "coefficient", "exponent", "p", "tau", "tolerance"});
    const double s = get<double>(j, "exponent", "form");
    if (!(s > -1.0)) throw Error("abs_power exponent must exceed -1 for the elements to exist");
    f.V = [c, s](double x) { return c * std::pow(std::abs(x), s); };
    f.singular_points = {0.0};
    char buf[96];
    std::snprintf(buf, sizeof buf, "(%g%+gi)|x|^%g", c.real(), c.imag(), s);
    f.label = buf;
  } else if (shape == "gaussian") {
    only_keys(j, "form", {"kind", "shape", "coefficient", "width", "center", "p", "tau", "tolerance"});
    const double w = get_or<double>(j, "width", "form", 1.0);
    const double x0 = get_or<double>(j, "center", "form", 0.0);
    if (!(w > 0.0)) throw Error("gaussian width must be positive");
    f.V = [c, w, x0](double x) { return c * std::exp(-std::pow((x - x0) / w, 2)); };
    char buf[128];
    std::snprintf(buf, sizeof buf, "(%g%+gi)exp(-((x-%g)/%g)^2)", c.real(), c.imag(), x0, w);
    f.label = buf;
  } else {
    throw Error("unknown potential shape '" + shape + "'");
  }
  return f;
}

forms::PerturbationForm parse_form(const json& j, const std::string& base_dir) {
  const auto kind = get<std::string>(j, "kind", "form");
  if (kind == "delta") {
    only_keys(j, "form", {"kind", "nu", "x0"});
    return {forms::Delta{get_complex(j, "nu", "form"), get_or<double>(j, "x0", "form", 0.0)}};
  }
  if (kind == "multidelta") {
    only_keys(j, "form", {"kind", "gamma", "beta", "nu0", "tail_radius", "tail_tolerance"});
    forms::MultiDelta m{get<double>(j, "gamma", "form"), get<double>(j, "beta", "form"),
                        get_complex(j, "nu0", "form", 1.0), {}};
    m.tail.radius = get_or<double>(j, "tail_radius", "form", 0.0);
    m.tail.tolerance = get_or<double>(j, "tail_tolerance", "form", 1e-13);
    return {m};
  }
  if (kind == "potential") return {parse_potential(j)};
  if (kind == "linear") {
    only_keys(j, "form", {"kind", "c"});
    return {forms::TridiagonalLinear{get_complex(j, "c", "form")}};
  }
  if (kind == "raw") {
    only_keys(j, "form", {"kind", "path", "M_b", "alpha"});
    std::filesystem::path p = get<std::string>(j, "path", "form");
    if (p.is_relative()) p = std::filesystem::path(base_dir) / p;
    return {forms::RawMatrix(forms::read_matrix_csv_file(p.string()), get<double>(j, "M_b", "form"),
                             get<double>(j, "alpha", "form"))};
  }
  throw Error("unknown form kind '" + kind + "'");
}

PipelineOptions parse_pipeline(const json& j) {
  only_keys(j, "pipeline",
            {"K", "trust_tol", "max_roundoff", "fit_grid", "samples_per_arc", "kato_samples", "contour_nodes",
             "contour_indices", "growth_range", "seed"});
  PipelineOptions p;
  p.K = get_count(j, "K", "pipeline", 0);
  if (j.contains("trust_tol")) p.trust_tol = get<double>(j, "trust_tol", "pipeline");
  p.max_roundoff = get_or<double>(j, "max_roundoff", "pipeline", p.max_roundoff);
  p.fit_grid = get_count(j, "fit_grid", "pipeline", p.fit_grid);
  p.samples_per_arc = get_count(j, "samples_per_arc", "pipeline", p.samples_per_arc);
  p.kato_samples = get_count(j, "kato_samples", "pipeline", p.kato_samples);
  p.contour_nodes = get_count(j, "contour_nodes", "pipeline", p.contour_nodes);
  p.contour_indices = get_count(j, "contour_indices", "pipeline", p.contour_indices);
  p.seed = get_count(j, "seed", "pipeline", p.seed);
  if (j.contains("growth_range")) {
    const auto r = get<std::vector<std::size_t>>(j, "growth_range", "pipeline");
    if (r.size() != 2 || r[0] == 0 || r[1] < r[0]) throw Error("'pipeline.growth_range' must be [lo, hi] with 1 <= lo <= hi");
    p.growth_range = std::make_pair(r[0], r[1]);
  }
  if (p.K != 0 && p.K < 8) throw Error("'pipeline.K' must be at least 8");
  if (p.trust_tol && !(*p.trust_tol > 0.0)) throw Error("'pipeline.trust_tol' must be positive");
  return p;
}

}  // namespace

RunConfig parse_config(const json& j, const std::string& base_dir) {
  only_keys(j, "config", {"model", "form", "pipeline", "output"});
  RunConfig c;
  c.source = j;
  if (j.contains("model")) c.model = parse_model(j.at("model"));
  if (!j.contains("form")) throw Error("missing key 'config.form'");
  c.form = parse_form(j.at("form"), base_dir);
  if (j.contains("pipeline")) c.pipeline = parse_pipeline(j.at("pipeline"));
  if (j.contains("output")) {
    only_keys(j.at("output"), "output", {"dir"});
    c.out_dir = get_or<std::string>(j.at("output"), "dir", "output", c.out_dir);
  }
  return c;
}

RunConfig load_config(const std::string& path) {
  json j;
  try {
    j = json::parse(io::read_file(path));
  } catch (const json::parse_error& e) {
    throw Error("cannot parse " + path + ": " + e.what());
  }
  const auto dir = std::filesystem::path(path).parent_path();
  return parse_config(j, dir.empty() ? "." : dir.string());
}

std::string config_hash(const json& j) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : j.dump()) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace riesz_osc::config
