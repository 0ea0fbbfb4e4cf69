#pragma once

// JSON file formats for matrices, devices and games. Matrices are nested
// arrays of [re, im] pairs in row-major order. Letters may be written either
// as flat integers or as per-factor arrays.

#include <fstream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "randx/catalog.hpp"

namespace randx {

using Json = nlohmann::ordered_json;

namespace detail {

[[noreturn]] inline void parse_error(const std::string& what) { throw Error(ErrorCode::Parse, what); }

inline const Json& require_key(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) parse_error(std::string("missing key '") + key + "'");
  return j.at(key);
}

inline std::size_t to_index(const Json& j, const char* what) {
  if (!j.is_number_integer() || j.get<long long>() < 0) parse_error(std::string(what) + " must be a nonnegative integer");
  return j.get<std::size_t>();
}

inline double to_real(const Json& j, const char* what) {
  if (!j.is_number()) parse_error(std::string(what) + " must be a number");
  return j.get<double>();
}

inline std::vector<std::size_t> to_index_list(const Json& j, const char* what) {
  if (!j.is_array()) parse_error(std::string(what) + " must be an array");
  std::vector<std::size_t> out;
  for (const auto& v : j) out.push_back(to_index(v, what));
  return out;
}

inline std::size_t to_letter(const Json& j, const Alphabet& alphabet, const char* what) {
  if (j.is_array()) {
    const auto digits = to_index_list(j, what);
    return alphabet.encode(digits);
  }
  const std::size_t letter = to_index(j, what);
  if (letter >= alphabet.size()) throw Error(ErrorCode::UnknownLetter, std::string(what) + " out of range");
  return letter;
}

inline Alphabet to_alphabet(const Json& j, const char* what) {
  if (j.is_number_integer()) return Alphabet::plain(to_index(j, what));
  auto radices = to_index_list(j, what);
  if (radices.empty()) parse_error(std::string(what) + " must not be empty");
  return Alphabet::product(std::move(radices));
}

inline Json alphabet_json(const Alphabet& a) {
  if (a.factors() == 1) return a.radices.front();
  return a.radices;
}

}  // namespace detail

inline Json matrix_to_json(const ComplexMatrix& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(Json::array({m(i, j).real(), m(i, j).imag()}));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline ComplexMatrix matrix_from_json(const Json& j) {
  if (!j.is_array() || j.empty()) detail::parse_error("matrix must be a non-empty array of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = static_cast<Eigen::Index>(j.front().is_array() ? j.front().size() : 0);
  if (cols == 0) detail::parse_error("matrix rows must be non-empty arrays");
  ComplexMatrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const auto& row = j[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) detail::parse_error("ragged matrix");
    for (Eigen::Index k = 0; k < cols; ++k) {
      const auto& e = row[static_cast<std::size_t>(k)];
      if (e.is_number()) {
        m(i, k) = e.get<double>();
      } else if (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number()) {
        m(i, k) = Complex(e[0].get<double>(), e[1].get<double>());
      } else {
        detail::parse_error("matrix entries must be [re, im] pairs");
      }
    }
  }
  require_finite(m, "matrix");
  return m;
}

inline DeviceKind device_kind_from_string(const std::string& s) {
  if (s == "general") return DeviceKind::general;
  if (s == "components") return DeviceKind::components;
  if (s == "contextual") return DeviceKind::contextual;
  if (s == "abstract") return DeviceKind::abstract;
  detail::parse_error("unknown device kind '" + s + "'");
}

inline GameKind game_kind_from_string(const std::string& s) {
  if (s == "general") return GameKind::general;
  if (s == "nonlocal") return GameKind::nonlocal;
  if (s == "contextual") return GameKind::contextual;
  detail::parse_error("unknown game kind '" + s + "'");
}

inline Json device_to_json(const Device& d) {
  Json j;
  j["kind"] = to_string(d.kind);
  j["dims"] = d.dims;
  j["input_alphabet"] = detail::alphabet_json(d.inputs);
  j["output_alphabet"] = detail::alphabet_json(d.outputs);
  j["phi"] = matrix_to_json(d.phi);
  Json inputs = Json::array();
  for (std::size_t a = 0; a < d.num_inputs(); ++a) {
    Json in;
    in["letter"] = a;
    Json projectors = Json::array();
    for (const auto& b : d.measurements[a].branches)
      projectors.push_back(Json{{"output", b.output}, {"matrix", matrix_to_json(b.projector)}});
    in["projectors"] = std::move(projectors);
    if (!d.unitary_is_identity(a)) in["unitary"] = matrix_to_json(d.unitaries[a]);
    inputs.push_back(std::move(in));
  }
  j["inputs"] = std::move(inputs);
  if (d.contextual) {
    Json obs = Json::array();
    for (const auto& ob : d.contextual->observables) {
      Json list = Json::array();
      for (const auto& p : ob) list.push_back(matrix_to_json(p));
      obs.push_back(std::move(list));
    }
    j["contextual"] = Json{{"observables", std::move(obs)},
                           {"contexts", d.contextual->contexts},
                           {"outcomes", d.contextual->outcomes}};
  }
  return j;
}

inline Device device_from_json(const Json& j) {
  Device d;
  d.kind = device_kind_from_string(detail::require_key(j, "kind").get<std::string>());
  d.phi = matrix_from_json(detail::require_key(j, "phi"));
  require_square(d.phi, "phi");
  d.dims = j.contains("dims") ? detail::to_index_list(j.at("dims"), "dims") : std::vector<std::size_t>{d.dim()};

  std::optional<ContextualStructure> cs;
  if (j.contains("contextual")) {
    const Json& c = j.at("contextual");
    ContextualStructure s;
    for (const auto& ob : detail::require_key(c, "observables")) {
      std::vector<ComplexMatrix> list;
      for (const auto& m : ob) list.push_back(matrix_from_json(m));
      s.observables.push_back(std::move(list));
    }
    for (const auto& ctx : detail::require_key(c, "contexts")) s.contexts.push_back(detail::to_index_list(ctx, "context"));
    s.outcomes = c.contains("outcomes") ? detail::to_index(c.at("outcomes"), "outcomes") : 2;
    cs = std::move(s);
  }
  if (d.kind == DeviceKind::contextual && cs && !j.contains("inputs")) {
    Device built = make_contextual_device(d.phi, *cs);
    return built;
  }

  const Json& inputs = detail::require_key(j, "inputs");
  if (!inputs.is_array()) detail::parse_error("inputs must be an array");
  if (j.contains("input_alphabet")) {
    d.inputs = detail::to_alphabet(j.at("input_alphabet"), "input_alphabet");
  } else {
    d.inputs = Alphabet::plain(inputs.size());
  }
  if (j.contains("output_alphabet")) {
    d.outputs = detail::to_alphabet(j.at("output_alphabet"), "output_alphabet");
  } else {
    std::size_t most = 0;
    for (const auto& in : inputs)
      for (const auto& p : detail::require_key(in, "projectors"))
        most = std::max(most, detail::to_index(detail::require_key(p, "output"), "output") + 1);
    d.outputs = Alphabet::plain(most);
  }
  d.measurements.resize(d.num_inputs());
  d.unitaries = identity_unitaries(d.num_inputs(), d.dim());
  std::vector<bool> seen(d.num_inputs(), false);
  for (const auto& in : inputs) {
    const std::size_t a = detail::to_letter(detail::require_key(in, "letter"), d.inputs, "input letter");
    if (seen[a]) detail::parse_error("input letter listed twice");
    seen[a] = true;
    for (const auto& p : detail::require_key(in, "projectors")) {
      const std::size_t x = detail::to_letter(detail::require_key(p, "output"), d.outputs, "output letter");
      d.measurements[a].branches.push_back({x, matrix_from_json(detail::require_key(p, "matrix"))});
    }
    if (in.contains("unitary")) d.unitaries[a] = matrix_from_json(in.at("unitary"));
  }
  d.contextual = std::move(cs);
  return d;
}

inline Json game_to_json(const Game& g) {
  Json j;
  j["name"] = g.name;
  j["kind"] = to_string(g.kind);
  if (g.kind == GameKind::nonlocal) j["players"] = g.inputs.factors();
  if (g.kind == GameKind::contextual) {
    j["contexts"] = g.contexts;
    j["observables"] = g.observables;
  }
  j["input_alphabet"] = detail::alphabet_json(g.inputs);
  j["output_alphabet"] = detail::alphabet_json(g.outputs);
  j["distribution"] = g.distribution;
  Json scoring = Json::array();
  for (std::size_t a = 0; a < g.num_inputs(); ++a)
    for (std::size_t x = 0; x < g.num_outputs(); ++x)
      if (g.score(a, x) != 0.0) scoring.push_back(Json{{"input", a}, {"output", x}, {"score", g.score(a, x)}});
  j["scoring"] = std::move(scoring);
  j["distinguished_input"] = g.distinguished;
  if (g.unbounded) j["unbounded"] = true;
  return j;
}

inline Game game_from_json(const Json& j) {
  Game g;
  g.name = j.contains("name") ? j.at("name").get<std::string>() : "game";
  g.kind = j.contains("kind") ? game_kind_from_string(j.at("kind").get<std::string>()) : GameKind::general;
  g.inputs = detail::to_alphabet(detail::require_key(j, "input_alphabet"), "input_alphabet");
  g.outputs = detail::to_alphabet(detail::require_key(j, "output_alphabet"), "output_alphabet");
  if (g.kind == GameKind::nonlocal && j.contains("players") &&
      detail::to_index(j.at("players"), "players") != g.inputs.factors())
    detail::parse_error("players differs from the number of alphabet factors");
  if (g.kind == GameKind::contextual) {
    for (const auto& ctx : detail::require_key(j, "contexts")) g.contexts.push_back(detail::to_index_list(ctx, "context"));
    if (j.contains("observables")) {
      g.observables = detail::to_index(j.at("observables"), "observables");
    } else {
      for (const auto& c : g.contexts)
        for (auto b : c) g.observables = std::max(g.observables, b + 1);
    }
  }
  if (j.contains("distribution")) {
    const Json& dist = j.at("distribution");
    if (!dist.is_array()) detail::parse_error("distribution must be an array");
    for (const auto& p : dist) g.distribution.push_back(detail::to_real(p, "probability"));
  } else {
    g.distribution.assign(g.num_inputs(), 1.0 / static_cast<double>(g.num_inputs()));
  }
  g.scores.assign(g.num_inputs() * g.num_outputs(), 0.0);
  if (j.contains("scoring"))
    for (const auto& e : j.at("scoring")) {
      const std::size_t a = detail::to_letter(detail::require_key(e, "input"), g.inputs, "input letter");
      const std::size_t x = detail::to_letter(detail::require_key(e, "output"), g.outputs, "output letter");
      g.set_score(a, x, detail::to_real(detail::require_key(e, "score"), "score"));
    }
  g.distinguished =
      j.contains("distinguished_input") ? detail::to_letter(j.at("distinguished_input"), g.inputs, "distinguished_input") : 0;
  g.unbounded = j.contains("unbounded") && j.at("unbounded").get<bool>();
  return g;
}

inline Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Parse, "cannot open '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::Parse, path + ": " + e.what());
  }
}

/// Catalog name or path to a game file.
inline Game load_game(const std::string& source) {
  if (auto g = catalog_game(source)) return *g;
  try {
    return game_from_json(read_json_file(source));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::Parse, source + ": " + e.what());
  }
}

/// Catalog name or path to a device file.
inline Device load_device(const std::string& source) {
  if (auto d = catalog_device(source)) return *d;
  try {
    return device_from_json(read_json_file(source));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::Parse, source + ": " + e.what());
  }
}

}  // namespace randx
