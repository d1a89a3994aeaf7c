// Copyright The riesz-osc Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "riesz_osc/bounds.hpp"
#include "riesz_osc/forms.hpp"
#include "riesz_osc/oscillator.hpp"
#include "riesz_osc/spectral.hpp"

namespace riesz_osc::io {

using json = nlohmann::ordered_json;

json complex_to_json(cplx z);
cplx complex_from_json(const json& j);

/// {"kind": "harmonic"} or {"kind": "table", "mu": [...], "tail_gap": g}.
json model_to_json(const OscillatorModel& m);
OscillatorModel model_from_json(const json& j);

json fit_to_json(const forms::EnvelopeFit& fit);

json certificate_to_json(const bounds::EnclosureCertificate& cert);
/// Throws Error on missing or malformed fields.
bounds::EnclosureCertificate certificate_from_json(const json& j);

json spectrum_summary(const spectral::SpectralResult& r);
json audit_to_json(const spectral::BAudit& a);
json kato_to_json(const spectral::KatoReport& k);
json decay_to_json(const spectral::DecayFit& d);

/// Shortest representation that reads back to the same double.
std::string format_double(double x);

/// n,re_lambda,im_lambda,converged,region,dist_to_mu
void write_eigenvalues_csv(std::ostream& out, const spectral::SpectralResult& r);
/// n,sqrt_n,log_norm
void write_growth_csv(std::ostream& out, const spectral::GrowthReport& g);

/// Writes `content` to `path` through a temporary file in the same directory
/// and a rename, so readers never see a partial file.
void write_file_atomic(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

}  // namespace riesz_osc::io
