#pragma once

#include <cmath>
#include <fstream>
#include <istream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "loewner/errors.hpp"
#include "loewner/integral_rep.hpp"
#include "loewner/linalg.hpp"
#include "loewner/verdict.hpp"

namespace loewner::io {

using nlohmann::json;

/// {"n": int, "re": [[...]], "im": [[...]]}; "im" is written only when some
/// entry has a nonzero imaginary part.
inline json matrix_to_json(const CMatrix& m) {
  json re = json::array(), im = json::array();
  bool complex = false;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json rrow = json::array(), irow = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      rrow.push_back(m(i, j).real());
      irow.push_back(m(i, j).imag());
      complex = complex || m(i, j).imag() != 0.0;
    }
    re.push_back(std::move(rrow));
    im.push_back(std::move(irow));
  }
  json out = {{"n", m.rows()}, {"re", std::move(re)}};
  if (complex) out["im"] = std::move(im);
  return out;
}

namespace detail {

inline std::vector<std::vector<double>> read_grid(const json& j, const char* key, std::size_t n) {
  if (!j.contains(key) || !j[key].is_array() || j[key].size() != n)
    throw InvalidArgument(std::string("matrix JSON: '") + key + "' must be an n x n array");
  std::vector<std::vector<double>> grid;
  for (const auto& row : j[key]) {
    if (!row.is_array() || row.size() != n)
      throw InvalidArgument(std::string("matrix JSON: '") + key + "' row has the wrong length");
    std::vector<double> r;
    for (const auto& v : row) {
      if (!v.is_number()) throw InvalidArgument("matrix JSON: entries must be numbers");
      r.push_back(v.get<double>());
    }
    grid.push_back(std::move(r));
  }
  return grid;
}

}  // namespace detail

inline CMatrix matrix_from_json(const json& j) {
  if (!j.is_object() || !j.contains("n") || !j["n"].is_number_integer())
    throw InvalidArgument("matrix JSON: missing integer field 'n'");
  const auto n = j["n"].get<long long>();
  if (n < 1 || n > 4096) throw InvalidArgument("matrix JSON: 'n' out of range");
  const auto un = static_cast<std::size_t>(n);
  auto re = detail::read_grid(j, "re", un);
  std::vector<std::vector<double>> im;
  if (j.contains("im")) im = detail::read_grid(j, "im", un);
  CMatrix m(n, n);
  for (std::size_t r = 0; r < un; ++r)
    for (std::size_t c = 0; c < un; ++c)
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          Complex(re[r][c], im.empty() ? 0.0 : im[r][c]);
  return m;
}

inline HermitianMatrix hermitian_from_json(const json& j) { return HermitianMatrix(matrix_from_json(j)); }

inline json verdict_to_json(const Verdict& v) {
  json out = {{"passed", v.passed}, {"checks_run", v.checks_run}, {"witness", nullptr}};
  if (v.witness) {
    const Witness& w = *v.witness;
    json mats = json::array();
    for (const auto& m : w.matrices) mats.push_back(matrix_to_json(m));
    json wj = {{"seed", w.seed}, {"trial", w.trial}, {"matrices", std::move(mats)},
               {"lambda_min", w.lambda_min}};
    if (!w.check.empty()) wj["check"] = w.check;
    if (!w.points.empty()) wj["points"] = w.points;
    if (w.base) wj["base"] = *w.base;
    out["witness"] = std::move(wj);
  }
  return out;
}

inline json measure_to_json(const RepresentingMeasure& m) {
  json atoms = json::array();
  for (const auto& a : m.atoms) atoms.push_back({{"lambda", a.lambda}, {"weight", a.weight}});
  json density = nullptr;
  if (m.density) {
    if (const auto* pd = std::get_if<PowerDensity>(&*m.density)) {
      density = {{"kind", "power_p"}, {"p", pd->p}};
    } else {
      const auto& nd = std::get<NodeDensity>(*m.density);
      density = {{"kind", "custom_nodes"}, {"lambdas", nd.lambdas}, {"weights", nd.weights}};
    }
  }
  return {{"atom_zero", m.atom_zero}, {"atom_inf", m.atom_inf}, {"atoms", std::move(atoms)},
          {"density", std::move(density)}};
}

inline RepresentingMeasure measure_from_json(const json& j) {
  auto number = [](const json& obj, const char* key) {
    if (!obj.contains(key) || !obj[key].is_number())
      throw InvalidArgument(std::string("measure JSON: missing number '") + key + "'");
    return obj[key].get<double>();
  };
  auto numbers = [](const json& obj, const char* key) {
    if (!obj.contains(key) || !obj[key].is_array())
      throw InvalidArgument(std::string("measure JSON: missing array '") + key + "'");
    std::vector<double> out;
    for (const auto& v : obj[key]) {
      if (!v.is_number()) throw InvalidArgument("measure JSON: arrays must hold numbers");
      out.push_back(v.get<double>());
    }
    return out;
  };
  if (!j.is_object()) throw InvalidArgument("measure JSON: expected an object");
  RepresentingMeasure m;
  m.atom_zero = number(j, "atom_zero");
  m.atom_inf = number(j, "atom_inf");
  if (!j.contains("atoms") || !j["atoms"].is_array())
    throw InvalidArgument("measure JSON: missing array 'atoms'");
  for (const auto& a : j["atoms"]) {
    if (!a.is_object()) throw InvalidArgument("measure JSON: atoms must be objects");
    m.atoms.push_back({number(a, "lambda"), number(a, "weight")});
  }
  if (j.contains("density") && !j["density"].is_null()) {
    const json& d = j["density"];
    if (!d.is_object() || !d.contains("kind") || !d["kind"].is_string())
      throw InvalidArgument("measure JSON: density needs a string 'kind'");
    const std::string kind = d["kind"].get<std::string>();
    if (kind == "power_p") m.density = PowerDensity{number(d, "p")};
    else if (kind == "custom_nodes") m.density = NodeDensity{numbers(d, "lambdas"), numbers(d, "weights")};
    else throw InvalidArgument("measure JSON: unknown density kind '" + kind + "'");
  }
  m.validate();
  return m;
}

/// Header "t,f" followed by rows of two numbers. Blank lines are skipped.
inline std::vector<Sample> read_samples_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw InvalidArgument("samples CSV: empty input");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "t,f") throw InvalidArgument("samples CSV: header must be 't,f'");
  std::vector<Sample> out;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    auto comma = line.find(',');
    if (comma == std::string::npos || line.find(',', comma + 1) != std::string::npos)
      throw InvalidArgument("samples CSV: line " + std::to_string(lineno) + " needs two fields");
    std::string what = "samples CSV line " + std::to_string(lineno);
    out.push_back({loewner::detail::parse_double(line.substr(0, comma), what),
                   loewner::detail::parse_double(line.substr(comma + 1), what)});
  }
  return out;
}

inline void write_samples_csv(std::ostream& out, const std::vector<Sample>& samples) {
  out << "t,f\n";
  out.precision(17);
  for (const auto& s : samples) out << s.t << ',' << s.f << '\n';
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw InvalidArgument("malformed JSON in " + path + ": " + e.what());
  }
}

}  // namespace loewner::io
