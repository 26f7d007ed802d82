#pragma once

// Scene files, graph export and JSON helpers. Everything emitted carries
// "schema": "hypervor/1".

#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "hypervor/bounds.hpp"
#include "hypervor/errors.hpp"
#include "hypervor/kernel.hpp"
#include "hypervor/thick_net.hpp"
#include "hypervor/words.hpp"

namespace hypervor {

using json = nlohmann::ordered_json;

inline constexpr const char* kSchema = "hypervor/1";

enum class SiteMode { Basepoints, MaximalNet };

inline std::string mode_name(SiteMode m) {
  return m == SiteMode::Basepoints ? "basepoints" : "maximal_net";
}

struct SceneFile {
  QuotientScene scene;  // generators, relators, epsilon, cap, seed, b, net region
  std::vector<MinkowskiPoint> basepoints;
  std::optional<double> truncation_radius;  // nullopt means "auto"
  SiteMode mode = SiteMode::Basepoints;
  bool has_seed = false;
  std::optional<FreenessMode> freeness;
  std::optional<double> volume;
};

namespace detail {

[[noreturn]] inline void field_error(const std::string& path, const std::string& what) {
  throw InputError(path + ": " + what);
}

inline double real_at(const json& j, const std::string& path) {
  if (!j.is_number()) field_error(path, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) field_error(path, "expected a finite number");
  return v;
}

inline std::int64_t int_at(const json& j, const std::string& path) {
  if (!j.is_number_integer()) field_error(path, "expected an integer");
  return j.get<std::int64_t>();
}

inline std::vector<double> reals_at(const json& j, const std::string& path, std::size_t n) {
  if (!j.is_array()) field_error(path, "expected an array of " + std::to_string(n) + " numbers");
  if (j.size() != n)
    field_error(path, "expected " + std::to_string(n) + " numbers, got " + std::to_string(j.size()));
  std::vector<double> out;
  for (std::size_t i = 0; i < n; ++i)
    out.push_back(real_at(j[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

inline MinkowskiPoint point_at(const json& j, const std::string& path) {
  const auto v = reals_at(j, path, 4);
  try {
    return MinkowskiPoint::from_coords({v[0], v[1], v[2], v[3]});
  } catch (const InvariantViolation& e) {
    field_error(path, e.what());
  }
}

inline json point_json(const MinkowskiPoint& p) {
  const auto& x = p.coords();
  return json::array({x[0], x[1], x[2], x[3]});
}

inline json matrix_json(const LorentzIsometry& g) {
  json row = json::array();
  for (const auto& r : g.matrix())
    for (double v : r) row.push_back(v);
  return row;
}

// 1-based line and column of a byte offset.
inline std::string position(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

}  // namespace detail

inline json parse_json_text(const std::string& text, const std::string& source) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw InputError(source + ": malformed JSON at " + detail::position(text, e.byte) + ": " +
                     e.what());
  }
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  if (in.bad()) throw IoError("cannot read " + path);
  return os.str();
}

inline void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << text;
  if (!out) throw IoError("cannot write " + path);
}

inline SceneFile parse_scene(const json& j) {
  using detail::field_error;
  if (!j.is_object()) field_error("scene", "expected an object");
  static const std::vector<std::string> known{
      "schema", "generators", "relators", "basepoints", "epsilon", "word_length_cap",
      "truncation_radius", "seed", "b_half_epsilon", "mode", "sample_budget",
      "region_center", "region_radius", "freeness", "volume"};
  for (auto it = j.begin(); it != j.end(); ++it)
    if (std::find(known.begin(), known.end(), it.key()) == known.end())
      field_error(it.key(), "unknown field");

  SceneFile f;
  if (j.contains("schema") && j["schema"] != kSchema)
    field_error("schema", std::string("expected \"") + kSchema + "\"");

  if (!j.contains("generators")) field_error("generators", "missing");
  if (!j["generators"].is_array()) field_error("generators", "expected an array");
  for (std::size_t i = 0; i < j["generators"].size(); ++i) {
    const std::string path = "generators[" + std::to_string(i) + "]";
    const auto v = detail::reals_at(j["generators"][i], path, 16);
    Mat4 m{};
    for (int r = 0; r < 4; ++r)
      for (int c = 0; c < 4; ++c) m[r][c] = v[4 * r + c];
    if (auto why = LorentzIsometry::violation(m); !why.empty()) field_error(path, why);
    f.scene.generators.push_back(LorentzIsometry::from_matrix(m));
  }
  const int ngen = static_cast<int>(f.scene.generators.size());

  if (j.contains("relators")) {
    if (!j["relators"].is_array()) field_error("relators", "expected an array");
    for (std::size_t i = 0; i < j["relators"].size(); ++i) {
      const std::string path = "relators[" + std::to_string(i) + "]";
      if (!j["relators"][i].is_array()) field_error(path, "expected an array of letters");
      Word w;
      for (std::size_t k = 0; k < j["relators"][i].size(); ++k) {
        const auto x = detail::int_at(j["relators"][i][k], path + "[" + std::to_string(k) + "]");
        if (x == 0 || x > ngen || x < -ngen)
          field_error(path + "[" + std::to_string(k) + "]", "letter out of range");
        w.push_back(static_cast<int>(x));
      }
      f.scene.relators.push_back(w);
    }
  }

  if (j.contains("mode")) {
    if (!j["mode"].is_string()) field_error("mode", "expected a string");
    const auto m = j["mode"].get<std::string>();
    if (m == "basepoints") f.mode = SiteMode::Basepoints;
    else if (m == "maximal_net") f.mode = SiteMode::MaximalNet;
    else field_error("mode", "expected \"basepoints\" or \"maximal_net\"");
  }

  if (j.contains("basepoints")) {
    if (!j["basepoints"].is_array()) field_error("basepoints", "expected an array");
    for (std::size_t i = 0; i < j["basepoints"].size(); ++i)
      f.basepoints.push_back(
          detail::point_at(j["basepoints"][i], "basepoints[" + std::to_string(i) + "]"));
  }
  if (f.mode == SiteMode::Basepoints && f.basepoints.empty())
    field_error("basepoints", "at least one basepoint is required in basepoints mode");
  if (f.mode == SiteMode::MaximalNet && !f.basepoints.empty())
    field_error("basepoints", "must be empty in maximal_net mode");

  if (j.contains("epsilon")) f.scene.epsilon = detail::real_at(j["epsilon"], "epsilon");
  if (!(f.scene.epsilon > 0.0)) field_error("epsilon", "must be positive");
  if (j.contains("word_length_cap")) {
    const auto c = detail::int_at(j["word_length_cap"], "word_length_cap");
    if (c < 1 || c > 12) field_error("word_length_cap", "must lie in 1..12");
    f.scene.word_length_cap = static_cast<int>(c);
  }
  if (j.contains("truncation_radius")) {
    const auto& t = j["truncation_radius"];
    if (t.is_string()) {
      if (t.get<std::string>() != "auto") field_error("truncation_radius", "expected a number or \"auto\"");
    } else {
      const double r = detail::real_at(t, "truncation_radius");
      if (!(r > 0.0)) field_error("truncation_radius", "must be positive");
      f.truncation_radius = r;
    }
  }
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned()) field_error("seed", "expected an unsigned integer");
    f.scene.seed = j["seed"].get<std::uint64_t>();
    f.has_seed = true;
  }
  if (j.contains("b_half_epsilon")) {
    f.scene.b_half_epsilon = detail::real_at(j["b_half_epsilon"], "b_half_epsilon");
    if (!(f.scene.b_half_epsilon > 0.0)) field_error("b_half_epsilon", "must be positive");
  }
  if (j.contains("sample_budget")) {
    const auto n = detail::int_at(j["sample_budget"], "sample_budget");
    if (n < 1 || n > 100000) field_error("sample_budget", "must lie in 1..100000");
    f.scene.sample_budget = static_cast<int>(n);
  }
  if (j.contains("region_center"))
    f.scene.region_center = detail::point_at(j["region_center"], "region_center");
  if (j.contains("region_radius")) {
    f.scene.region_radius = detail::real_at(j["region_radius"], "region_radius");
    if (!(f.scene.region_radius > 0.0)) field_error("region_radius", "must be positive");
  }
  if (j.contains("freeness")) {
    const auto& fr = j["freeness"];
    if (!fr.is_object()) field_error("freeness", "expected {\"kind\": ..., \"k\": ...}");
    for (auto it = fr.begin(); it != fr.end(); ++it)
      if (it.key() != "kind" && it.key() != "k") field_error("freeness." + it.key(), "unknown field");
    if (!fr.contains("kind") || !fr["kind"].is_string()) field_error("freeness.kind", "expected a string");
    FreenessMode m;
    const auto kind = fr["kind"].get<std::string>();
    if (kind == "k_free") m.kind = FreenessKind::KFree;
    else if (kind == "semifree") m.kind = FreenessKind::Semifree;
    else field_error("freeness.kind", "expected \"k_free\" or \"semifree\"");
    if (!fr.contains("k")) field_error("freeness.k", "missing");
    const auto k = detail::int_at(fr["k"], "freeness.k");
    if (k < 1 || k > 64) field_error("freeness.k", "must lie in 1..64");
    m.k = static_cast<int>(k);
    f.freeness = m;
  }
  if (j.contains("volume")) {
    const double v = detail::real_at(j["volume"], "volume");
    if (!(v > 0.0)) field_error("volume", "must be positive");
    f.volume = v;
  }
  return f;
}

inline SceneFile parse_scene_text(const std::string& text, const std::string& source = "scene") {
  return parse_scene(parse_json_text(text, source));
}

inline SceneFile parse_scene_file(const std::string& path) {
  return parse_scene_text(read_file(path), path);
}

inline json scene_to_json(const SceneFile& f) {
  json j;
  j["schema"] = kSchema;
  j["mode"] = mode_name(f.mode);
  j["generators"] = json::array();
  for (const auto& g : f.scene.generators) j["generators"].push_back(detail::matrix_json(g));
  if (!f.scene.relators.empty()) j["relators"] = f.scene.relators;
  j["basepoints"] = json::array();
  for (const auto& p : f.basepoints) j["basepoints"].push_back(detail::point_json(p));
  j["epsilon"] = f.scene.epsilon;
  j["word_length_cap"] = f.scene.word_length_cap;
  if (f.truncation_radius) j["truncation_radius"] = *f.truncation_radius;
  else j["truncation_radius"] = "auto";
  if (f.has_seed) j["seed"] = f.scene.seed;
  j["b_half_epsilon"] = f.scene.b_half_epsilon;
  j["sample_budget"] = f.scene.sample_budget;
  j["region_center"] = detail::point_json(f.scene.region_center);
  j["region_radius"] = f.scene.region_radius;
  if (f.freeness)
    j["freeness"] = {{"kind", f.freeness->kind == FreenessKind::KFree ? "k_free" : "semifree"},
                     {"k", f.freeness->k}};
  if (f.volume) j["volume"] = *f.volume;
  return j;
}

// ---------------------------------------------------------------------------
// Graph export.

struct ExportEdge {
  int u = 0, v = 0;
  bool loop = false;
  bool dd = false;
  double length = 0.0;
  int color_u = 0, color_v = 0;
  Word word;
  friend bool operator==(const ExportEdge&, const ExportEdge&) = default;
};

struct GraphExport {
  int vertices = 0;
  std::vector<ExportEdge> edges;
  friend bool operator==(const GraphExport&, const GraphExport&) = default;
};

inline json graph_to_json(const GraphExport& g) {
  json j;
  j["schema"] = kSchema;
  j["kind"] = "dual_graph";
  j["vertices"] = g.vertices;
  j["edges"] = json::array();
  for (const auto& e : g.edges)
    j["edges"].push_back({{"u", e.u}, {"v", e.v}, {"loop", e.loop}, {"dd", e.dd},
                          {"length", e.length}, {"color_u", e.color_u},
                          {"color_v", e.color_v}, {"word", e.word}});
  return j;
}

inline GraphExport parse_graph(const json& j) {
  using detail::field_error;
  if (!j.is_object()) field_error("graph", "expected an object");
  if (!j.contains("schema") || j["schema"] != kSchema) field_error("schema", "expected \"hypervor/1\"");
  GraphExport g;
  if (!j.contains("vertices")) field_error("vertices", "missing");
  const auto n = detail::int_at(j["vertices"], "vertices");
  if (n < 0) field_error("vertices", "must be nonnegative");
  g.vertices = static_cast<int>(n);
  if (!j.contains("edges") || !j["edges"].is_array()) field_error("edges", "expected an array");
  for (std::size_t i = 0; i < j["edges"].size(); ++i) {
    const std::string path = "edges[" + std::to_string(i) + "]";
    const auto& x = j["edges"][i];
    if (!x.is_object()) field_error(path, "expected an object");
    ExportEdge e;
    e.u = static_cast<int>(detail::int_at(x.value("u", json()), path + ".u"));
    e.v = static_cast<int>(detail::int_at(x.value("v", json()), path + ".v"));
    if (e.u < 0 || e.u >= g.vertices || e.v < 0 || e.v >= g.vertices)
      field_error(path, "endpoint out of range");
    if (!x.contains("loop") || !x["loop"].is_boolean()) field_error(path + ".loop", "expected a boolean");
    if (!x.contains("dd") || !x["dd"].is_boolean()) field_error(path + ".dd", "expected a boolean");
    e.loop = x["loop"].get<bool>();
    e.dd = x["dd"].get<bool>();
    e.length = detail::real_at(x.value("length", json()), path + ".length");
    e.color_u = static_cast<int>(detail::int_at(x.value("color_u", json()), path + ".color_u"));
    e.color_v = static_cast<int>(detail::int_at(x.value("color_v", json()), path + ".color_v"));
    if (!x.contains("word") || !x["word"].is_array()) field_error(path + ".word", "expected an array");
    for (std::size_t k = 0; k < x["word"].size(); ++k)
      e.word.push_back(static_cast<int>(
          detail::int_at(x["word"][k], path + ".word[" + std::to_string(k) + "]")));
    g.edges.push_back(std::move(e));
  }
  return g;
}

inline std::string graph_to_dot(const GraphExport& g) {
  std::ostringstream os;
  os.precision(10);
  os << "digraph dual_graph {\n";
  for (int v = 0; v < g.vertices; ++v) os << "  " << v << " [label=\"" << v << "\"];\n";
  for (const auto& e : g.edges) {
    os << "  " << e.u << " -> " << e.v << " [loop=" << (e.loop ? "true" : "false")
       << ", dd=" << (e.dd ? "true" : "false") << ", length=" << e.length
       << ", colors=\"" << e.color_u << "," << e.color_v << "\", label=\""
       << word_string(e.word) << "\"";
    if (e.dd) os << ", style=dashed";
    os << "];\n";
  }
  os << "}\n";
  return os.str();
}

}  // namespace hypervor
