// Copyright The riesz-osc Authors
// SPDX-License-Identifier: Apache-2.0

#include <fstream>
#include <map>
#include <sstream>

#include "riesz_osc/forms.hpp"

namespace riesz_osc::forms {

linalg::ComplexMatrix read_matrix_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw Error("matrix CSV is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "m,n,re,im") throw Error("matrix CSV header must be 'm,n,re,im'");
  std::map<std::pair<std::size_t, std::size_t>, cplx> entries;
  std::size_t size = 0, lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string field[4];
    for (int i = 0; i < 4; ++i)
      if (!std::getline(row, field[i], i < 3 ? ',' : '\n'))
        throw Error("matrix CSV line " + std::to_string(lineno) + " needs four fields");
    try {
      const long m = std::stol(field[0]), n = std::stol(field[1]);
      if (m < 1 || n < 1) throw Error("matrix CSV indices are 1-based (line " + std::to_string(lineno) + ")");
      const cplx v{std::stod(field[2]), std::stod(field[3])};
      const auto key = std::make_pair(static_cast<std::size_t>(m), static_cast<std::size_t>(n));
      if (!entries.emplace(key, v).second)
        throw Error("matrix CSV repeats entry (" + field[0] + ", " + field[1] + ")");
      size = std::max({size, key.first, key.second});
    } catch (const std::logic_error&) {
      throw Error("matrix CSV line " + std::to_string(lineno) + " is not numeric");
    }
  }
  linalg::ComplexMatrix out(size);
  for (const auto& [k, v] : entries) out(k.first - 1, k.second - 1) = v;
  return out;
}

linalg::ComplexMatrix read_matrix_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open matrix CSV " + path);
  return read_matrix_csv(in);
}

}  // namespace riesz_osc::forms
