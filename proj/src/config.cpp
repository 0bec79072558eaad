#include "svi/config.hpp"

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace svi {

namespace {

enum class Kind { SVec, SVecs, NVec, GridS, GridN, Number, Int, Bool, Text };

struct TaskSchema {
  std::map<std::string, Kind> keys;
};

const std::map<std::string, TaskSchema>& task_schemas() {
  static const std::map<std::string, TaskSchema> schemas = {
      {"feasibility", {{{"points", Kind::SVecs}}}},
      {"value-grid", {{{"grid", Kind::GridS}, {"force_subgradient", Kind::Bool}}}},
      {"convexity-audit", {{{"grid", Kind::GridS}, {"tol", Kind::Number}}}},
      {"lipschitz-audit", {{{"grid", Kind::GridS}, {"window", Kind::Int}}}},
      {"subdiff", {{{"points", Kind::SVecs}, {"allow_unverified", Kind::Bool}, {"oracle", Kind::Bool}}}},
      {"increase-cert",
       {{{"variable", Kind::Text},
         {"method", Kind::Text},
         {"p_grid", Kind::GridS},
         {"x_grid", Kind::GridN},
         {"alpha_max", Kind::Number},
         {"seed", Kind::Int}}}},
      {"error-bound-audit",
       {{{"alpha", Kind::Number},
         {"certified_alpha", Kind::Number},
         {"p_grid", Kind::GridS},
         {"x_grid", Kind::GridN},
         {"tol", Kind::Number}}}},
      {"penalty",
       {{{"points", Kind::SVecs},
         {"x_bar", Kind::NVec},
         {"lambda_max", Kind::Number},
         {"bisect_tol", Kind::Number},
         {"seed", Kind::Int}}}},
      {"calmness",
       {{{"points", Kind::SVecs},
         {"x_bar", Kind::NVec},
         {"r", Kind::Number},
         {"p_samples", Kind::Int},
         {"x_samples", Kind::Int},
         {"seed", Kind::Int}}}},
      {"subreg-check",
       {{{"points", Kind::SVecs}, {"x_bar", Kind::NVec}, {"r_beta", Kind::Number}, {"samples", Kind::Int},
         {"seed", Kind::Int}}}},
  };
  return schemas;
}

[[noreturn]] void syntax(const std::string& msg) { throw Error("config_syntax", msg); }
[[noreturn]] void dims(const std::string& msg) { throw Error("config_dims", msg); }

void only_keys(const Json& obj, const std::set<std::string>& allowed, const std::string& where) {
  if (!obj.is_object()) syntax(where + ": expected an object");
  for (const auto& [key, _] : obj.items()) {
    if (!allowed.count(key)) syntax(where + ": unknown key \"" + key + "\"");
  }
}

const Json& required(const Json& obj, const std::string& key, const std::string& where) {
  if (!obj.contains(key)) syntax(where + ": missing key \"" + key + "\"");
  return obj.at(key);
}

double number(const Json& v, const std::string& where) {
  if (!v.is_number()) syntax(where + ": expected a number");
  return v.get<double>();
}

Vec vec(const Json& v, int expected, const std::string& where) {
  if (!v.is_array()) syntax(where + ": expected an array of numbers");
  if (static_cast<int>(v.size()) != expected) {
    dims(where + ": expected length " + std::to_string(expected) + ", got " + std::to_string(v.size()));
  }
  Vec out(expected);
  for (int i = 0; i < expected; ++i) out(i) = number(v[i], where + "[" + std::to_string(i) + "]");
  return out;
}

Mat mat(const Json& v, int rows, int cols, const std::string& where) {
  if (!v.is_array()) syntax(where + ": expected an array of rows");
  if (static_cast<int>(v.size()) != rows) {
    dims(where + ": expected " + std::to_string(rows) + " rows, got " + std::to_string(v.size()));
  }
  Mat out(rows, cols);
  for (int i = 0; i < rows; ++i) out.row(i) = vec(v[i], cols, where + "[" + std::to_string(i) + "]").transpose();
  return out;
}

Json to_json(const Vec& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

Json to_json(const Mat& m) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) a.push_back(to_json(Vec(m.row(i).transpose())));
  return a;
}

void check_grid(const Json& g, int d, const std::string& where) {
  only_keys(g, {"lo", "hi", "step"}, where);
  const Vec lo = vec(required(g, "lo", where), d, where + ".lo");
  const Vec hi = vec(required(g, "hi", where), d, where + ".hi");
  const Vec step = vec(required(g, "step", where), d, where + ".step");
  for (int i = 0; i < d; ++i) {
    if (!(step(i) > 0.0) || hi(i) < lo(i)) syntax(where + ": need step > 0 and hi >= lo");
  }
}

AffineGenerator parse_generator(const Json& g, int s, int n, int m, const std::string& where) {
  only_keys(g, {"M", "L", "b"}, where);
  AffineGenerator out;
  out.M = s == 0 && !g.contains("M") ? Mat(m, 0) : mat(required(g, "M", where), m, s, where + ".M");
  out.L = mat(required(g, "L", where), m, n, where + ".L");
  out.b = g.contains("b") ? vec(g.at("b"), m, where + ".b") : Vec::Zero(m);
  return out;
}

bool same(const Mat& a, const Mat& b) { return a.rows() == b.rows() && a.cols() == b.cols() && a == b; }

}  // namespace

const std::vector<std::string>& task_order() {
  static const std::vector<std::string> order = {
      "feasibility", "value-grid", "convexity-audit", "lipschitz-audit", "subdiff",
      "increase-cert", "error-bound-audit", "penalty", "calmness", "subreg-check"};
  return order;
}

bool MapSpec::operator==(const MapSpec& o) const {
  if (kind != o.kind || generators.size() != o.generators.size() || blocks.size() != o.blocks.size()) return false;
  for (std::size_t i = 0; i < generators.size(); ++i) {
    const auto &a = generators[i], &b = o.generators[i];
    if (!same(a.M, b.M) || !same(a.L, b.L) || !same(a.b, b.b)) return false;
  }
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    if (blocks[i].size() != o.blocks[i].size()) return false;
    for (std::size_t j = 0; j < blocks[i].size(); ++j) {
      if (!same(blocks[i][j], o.blocks[i][j])) return false;
    }
  }
  return true;
}

bool InstanceConfig::operator==(const InstanceConfig& o) const {
  if (name != o.name || s != o.s || n != o.n || m != o.m || !(map == o.map) || tasks != o.tasks) return false;
  if (facets.size() != o.facets.size() || pieces.size() != o.pieces.size()) return false;
  for (std::size_t i = 0; i < facets.size(); ++i) {
    if (!same(facets[i], o.facets[i])) return false;
  }
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    if (!same(pieces[i].g_p, o.pieces[i].g_p) || !same(pieces[i].g_x, o.pieces[i].g_x) || pieces[i].c != o.pieces[i].c) {
      return false;
    }
  }
  if (quadratic.has_value() != o.quadratic.has_value()) return false;
  return !quadratic || same(*quadratic, *o.quadratic);
}

ProblemInstance InstanceConfig::build() const {
  PolyhedralCone cone(m, facets);
  SetValuedMap f;
  if (map.kind == "fan") {
    f = SetValuedMap::fan(map.generators);
  } else if (map.kind == "affine_plus_cone") {
    const AffineGenerator& g = map.generators.front();
    f = SetValuedMap::affine_plus_cone(g.M, g.L, g.b);
  } else {
    std::vector<GeneratorSet> sets;
    for (const auto& pts : map.blocks) sets.emplace_back(m, pts);
    f = separable_fan(sets);
  }
  return ProblemInstance(ConvexObjective(pieces, quadratic), std::move(f), std::move(cone));
}

TaskSpec parse_task(const Json& task, int s, int n) {
  if (!task.is_object()) syntax("tasks[]: expected an object");
  if (!task.contains("type") || !task.at("type").is_string()) syntax("tasks[]: missing string key \"type\"");
  TaskSpec out;
  out.type = task.at("type").get<std::string>();
  const auto& schemas = task_schemas();
  const auto it = schemas.find(out.type);
  if (it == schemas.end()) throw Error("config_task", "unknown task type \"" + out.type + "\"");
  const std::string where = "tasks[" + out.type + "]";
  for (const auto& [key, value] : task.items()) {
    if (key == "type") continue;
    const auto k = it->second.keys.find(key);
    if (k == it->second.keys.end()) throw Error("config_task", where + ": unknown key \"" + key + "\"");
    const std::string field = where + "." + key;
    switch (k->second) {
      case Kind::SVec:
        vec(value, s, field);
        break;
      case Kind::NVec:
        vec(value, n, field);
        break;
      case Kind::SVecs:
        if (!value.is_array() || value.empty()) syntax(field + ": expected a nonempty array of points");
        for (std::size_t i = 0; i < value.size(); ++i) vec(value[i], s, field + "[" + std::to_string(i) + "]");
        break;
      case Kind::GridS:
        check_grid(value, s, field);
        break;
      case Kind::GridN:
        check_grid(value, n, field);
        break;
      case Kind::Number:
        number(value, field);
        break;
      case Kind::Int:
        if (!value.is_number_integer()) syntax(field + ": expected an integer");
        break;
      case Kind::Bool:
        if (!value.is_boolean()) syntax(field + ": expected true or false");
        break;
      case Kind::Text:
        if (!value.is_string()) syntax(field + ": expected a string");
        break;
    }
    out.params[key] = value;
  }
  return out;
}

InstanceConfig parse_config(const Json& doc) {
  only_keys(doc, {"name", "dims", "cone", "map", "objective", "tasks"}, "config");
  InstanceConfig cfg;
  if (doc.contains("name")) {
    if (!doc.at("name").is_string()) syntax("name: expected a string");
    cfg.name = doc.at("name").get<std::string>();
  }

  const Json& d = required(doc, "dims", "config");
  only_keys(d, {"s", "n", "m"}, "dims");
  for (const char* key : {"s", "n", "m"}) {
    const Json& v = required(d, key, "dims");
    if (!v.is_number_integer() || v.get<int>() < 0) syntax(std::string("dims.") + key + ": expected an integer >= 0");
  }
  cfg.s = d.at("s").get<int>();
  cfg.n = d.at("n").get<int>();
  cfg.m = d.at("m").get<int>();
  if (cfg.n < 1 || cfg.m < 1) dims("dims: n and m must be at least 1");

  const Json& cone = required(doc, "cone", "config");
  only_keys(cone, {"facets"}, "cone");
  const Json& facets = required(cone, "facets", "cone");
  if (!facets.is_array() || facets.empty()) syntax("cone.facets: expected a nonempty array");
  for (std::size_t i = 0; i < facets.size(); ++i) {
    cfg.facets.push_back(vec(facets[i], cfg.m, "cone.facets[" + std::to_string(i) + "]"));
  }

  const Json& map = required(doc, "map", "config");
  if (!map.is_object() || !map.contains("kind") || !map.at("kind").is_string()) syntax("map: missing string key \"kind\"");
  cfg.map.kind = map.at("kind").get<std::string>();
  if (cfg.map.kind == "fan") {
    only_keys(map, {"kind", "generators"}, "map");
    const Json& gens = required(map, "generators", "map");
    if (!gens.is_array() || gens.empty()) syntax("map.generators: expected a nonempty array");
    for (std::size_t i = 0; i < gens.size(); ++i) {
      cfg.map.generators.push_back(
          parse_generator(gens[i], cfg.s, cfg.n, cfg.m, "map.generators[" + std::to_string(i) + "]"));
    }
  } else if (cfg.map.kind == "affine_plus_cone") {
    only_keys(map, {"kind", "A_p", "A_x", "b"}, "map");
    AffineGenerator g;
    g.M = cfg.s == 0 && !map.contains("A_p") ? Mat(cfg.m, 0) : mat(required(map, "A_p", "map"), cfg.m, cfg.s, "map.A_p");
    g.L = mat(required(map, "A_x", "map"), cfg.m, cfg.n, "map.A_x");
    g.b = map.contains("b") ? vec(map.at("b"), cfg.m, "map.b") : Vec::Zero(cfg.m);
    cfg.map.generators.push_back(std::move(g));
  } else if (cfg.map.kind == "separable_fan") {
    only_keys(map, {"kind", "blocks"}, "map");
    if (cfg.s != 0) dims("map.blocks: a separable fan has no parameter, need dims.s = 0");
    const Json& blocks = required(map, "blocks", "map");
    if (!blocks.is_array() || static_cast<int>(blocks.size()) != cfg.n) {
      dims("map.blocks: expected one block per state coordinate (" + std::to_string(cfg.n) + ")");
    }
    for (std::size_t i = 0; i < blocks.size(); ++i) {
      const std::string where = "map.blocks[" + std::to_string(i) + "]";
      if (!blocks[i].is_array() || blocks[i].empty()) syntax(where + ": expected a nonempty array of points");
      std::vector<Vec> pts;
      for (std::size_t j = 0; j < blocks[i].size(); ++j) {
        pts.push_back(vec(blocks[i][j], cfg.m, where + "[" + std::to_string(j) + "]"));
      }
      cfg.map.blocks.push_back(std::move(pts));
    }
  } else {
    syntax("map.kind: expected fan, affine_plus_cone or separable_fan");
  }

  const Json& obj = required(doc, "objective", "config");
  only_keys(obj, {"pieces", "quadratic"}, "objective");
  const Json& pieces = required(obj, "pieces", "objective");
  if (!pieces.is_array() || pieces.empty()) syntax("objective.pieces: expected a nonempty array");
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    const std::string where = "objective.pieces[" + std::to_string(i) + "]";
    only_keys(pieces[i], {"g_p", "g_x", "c"}, where);
    AffinePiece pc;
    pc.g_p = cfg.s == 0 && !pieces[i].contains("g_p") ? Vec(0) : vec(required(pieces[i], "g_p", where), cfg.s, where + ".g_p");
    pc.g_x = vec(required(pieces[i], "g_x", where), cfg.n, where + ".g_x");
    pc.c = pieces[i].contains("c") ? number(pieces[i].at("c"), where + ".c") : 0.0;
    cfg.pieces.push_back(std::move(pc));
  }
  if (obj.contains("quadratic")) {
    cfg.quadratic = mat(obj.at("quadratic"), cfg.s + cfg.n, cfg.s + cfg.n, "objective.quadratic");
  }

  const Json& tasks = required(doc, "tasks", "config");
  if (!tasks.is_array() || tasks.empty()) syntax("tasks: expected a nonempty array");
  for (const Json& t : tasks) cfg.tasks.push_back(parse_task(t, cfg.s, cfg.n));

  try {
    (void)cfg.build();
  } catch (const Error& e) {
    throw Error("config_dims", e.what());
  }
  return cfg;
}

InstanceConfig parse_config_text(const std::string& text) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const Json::parse_error& e) {
    const std::size_t upto = std::min<std::size_t>(e.byte, text.size());
    const long line = 1 + std::count(text.begin(), text.begin() + static_cast<long>(upto), '\n');
    throw Error("config_syntax", "line " + std::to_string(line) + ": " + e.what());
  }
  return parse_config(doc);
}

InstanceConfig load_instance(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("config_syntax", "cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

Json emit_instance(const InstanceConfig& cfg) {
  Json doc;
  doc["name"] = cfg.name;
  doc["dims"] = {{"s", cfg.s}, {"n", cfg.n}, {"m", cfg.m}};
  Json facets = Json::array();
  for (const Vec& a : cfg.facets) facets.push_back(to_json(a));
  doc["cone"] = {{"facets", facets}};
  Json map;
  map["kind"] = cfg.map.kind;
  if (cfg.map.kind == "fan") {
    Json gens = Json::array();
    for (const AffineGenerator& g : cfg.map.generators) {
      Json j;
      if (cfg.s > 0) j["M"] = to_json(g.M);
      j["L"] = to_json(g.L);
      j["b"] = to_json(g.b);
      gens.push_back(j);
    }
    map["generators"] = gens;
  } else if (cfg.map.kind == "affine_plus_cone") {
    const AffineGenerator& g = cfg.map.generators.front();
    if (cfg.s > 0) map["A_p"] = to_json(g.M);
    map["A_x"] = to_json(g.L);
    map["b"] = to_json(g.b);
  } else {
    Json blocks = Json::array();
    for (const auto& pts : cfg.map.blocks) {
      Json b = Json::array();
      for (const Vec& v : pts) b.push_back(to_json(v));
      blocks.push_back(b);
    }
    map["blocks"] = blocks;
  }
  doc["map"] = map;
  Json pieces = Json::array();
  for (const AffinePiece& pc : cfg.pieces) {
    Json j;
    if (cfg.s > 0) j["g_p"] = to_json(pc.g_p);
    j["g_x"] = to_json(pc.g_x);
    j["c"] = pc.c;
    pieces.push_back(j);
  }
  doc["objective"] = {{"pieces", pieces}};
  if (cfg.quadratic) doc["objective"]["quadratic"] = to_json(*cfg.quadratic);
  Json tasks = Json::array();
  for (const TaskSpec& t : cfg.tasks) {
    Json j = t.params;
    j["type"] = t.type;
    tasks.push_back(j);
  }
  doc["tasks"] = tasks;
  return doc;
}

std::string config_digest(const InstanceConfig& cfg) {
  const std::string text = emit_instance(cfg).dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace svi
