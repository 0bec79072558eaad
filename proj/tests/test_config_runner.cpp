#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "svi/runner.hpp"

using namespace svi;
namespace fs = std::filesystem;

namespace {

const fs::path kFixtures = SVI_FIXTURE_DIR;

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("svi_test_" + name);
  fs::remove_all(dir);
  return dir;
}

std::vector<std::string> csv_rows(const std::string& text) {
  std::vector<std::string> rows;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) {
    if (!line.empty() && line[0] != '#') rows.push_back(line);
  }
  return rows;
}

std::string config_error(const std::string& text) {
  try {
    parse_config_text(text);
  } catch (const Error& e) {
    return e.code() + "|" + e.what();
  }
  return "";
}

const char* kMinimal = R"({
  "name": "tiny",
  "dims": {"s": 1, "n": 1, "m": 1},
  "cone": {"facets": [[1]]},
  "map": {"kind": "fan", "generators": [{"M": [[-1]], "L": [[1]], "b": [0]}]},
  "objective": {"pieces": [{"g_p": [0], "g_x": [1], "c": 0}]},
  "tasks": [TASKS]
})";

std::string minimal_with(const std::string& tasks) {
  std::string s = kMinimal;
  s.replace(s.find("TASKS"), 5, tasks);
  return s;
}

}  // namespace

TEST_CASE("fixtures load and round-trip") {
  for (const char* name : {"worked_example.json", "first_example.json"}) {
    const InstanceConfig cfg = load_instance(kFixtures / name);
    const InstanceConfig again = parse_config(emit_instance(cfg));
    CHECK(again == cfg);
    CHECK(config_digest(again) == config_digest(cfg));
    CHECK(config_digest(cfg).size() == 16);
  }
  const InstanceConfig w = load_instance(kFixtures / "worked_example.json");
  CHECK(w.s == 1);
  CHECK(w.map.kind == "fan");
  CHECK(w.map.generators.size() == 2);
  CHECK(w.build().map.generators().size() == 2);
}

TEST_CASE("config errors carry stable codes") {
  const std::string broken = config_error("{\n  \"name\": \"x\",\n  \"dims\": \n}");
  CHECK(broken.rfind("config_syntax|", 0) == 0);
  CHECK(broken.find("line 4") != std::string::npos);

  std::string extra = minimal_with(R"({"type": "feasibility"})");
  extra.insert(1, "\"colour\": 1,");
  CHECK(config_error(extra).rfind("config_syntax|", 0) == 0);

  CHECK(config_error(minimal_with(R"({"type": "dance"})")).rfind("config_task|", 0) == 0);
  CHECK(config_error(minimal_with(R"({"type": "penalty", "lamda_max": 3})")).rfind("config_task|", 0) == 0);

  std::string bad_dims = minimal_with(R"({"type": "feasibility"})");
  bad_dims.replace(bad_dims.find("[[-1]]"), 6, "[[-1, 2]]");
  const std::string d = config_error(bad_dims);
  CHECK(d.rfind("config_dims|", 0) == 0);
  CHECK(d.find("M") != std::string::npos);

  CHECK(config_error(minimal_with(R"({"type": "feasibility", "points": [[1, 2]]})")).rfind("config_dims|", 0) == 0);
  CHECK(config_error(minimal_with(R"({"type": "feasibility"})")).empty());
  CHECK_THROWS_WITH_AS(load_instance(kFixtures / "missing.json"), doctest::Contains("config_syntax"), Error);
}

TEST_CASE("worked example run writes every artifact") {
  const fs::path out = scratch("worked");
  const RunReport rep = run(load_instance(kFixtures / "worked_example.json"), out);
  CHECK(rep.all_ok());
  CHECK(rep.tasks.size() == task_order().size());
  for (const TaskOutcome& t : rep.tasks) {
    INFO(t.type);
    CHECK(t.status == "ok");
    CHECK(fs::exists(out / t.artifact));
  }

  const std::string csv = slurp(out / "value-grid.csv");
  CHECK(csv.rfind("# svi 0.3.0 value-grid quantity=val\n", 0) == 0);
  const auto rows = csv_rows(csv);
  REQUIRE(rows.size() == 402);
  CHECK(rows[0] == "p0,status,value,argmin0,iterations");
  CHECK(rows[1].rfind("-2,Optimal,1,-1,", 0) == 0);

  const Json sub = Json::parse(slurp(out / "subdiff.json"));
  const Json& pts = sub.at("points");
  REQUIRE(pts.size() == 3);
  CHECK(pts[1].at("interval")[0].get<double>() == doctest::Approx(-0.5));
  CHECK(pts[1].at("interval")[1].get<double>() == doctest::Approx(2.0));
  CHECK(pts[1].at("oracle").at("upper").get<double>() == doctest::Approx(2.0));

  const Json summary = Json::parse(slurp(out / "run.json"));
  CHECK(summary.at("tool_version") == "0.3.0");
  CHECK(summary.at("config_digest") == rep.config_digest);
  CHECK(summary.at("seed") == 1);
  CHECK(summary.at("ok") == true);
  CHECK(summary.at("tasks").size() == rep.tasks.size());
  fs::remove_all(out);
}

TEST_CASE("first example value grid is unbounded everywhere") {
  const fs::path out = scratch("first");
  RunOptions o;
  o.only = {"value-grid"};
  const RunReport rep = run(load_instance(kFixtures / "first_example.json"), out, o);
  REQUIRE(rep.tasks.size() == 1);
  const auto rows = csv_rows(slurp(out / "value-grid.csv"));
  REQUIRE(rows.size() == 402);
  for (std::size_t i = 1; i < rows.size(); ++i) CHECK(rows[i].find(",Unbounded,,,") != std::string::npos);
  fs::remove_all(out);
}

TEST_CASE("sampled tasks are reproducible for a fixed seed") {
  const InstanceConfig cfg = load_instance(kFixtures / "worked_example.json");
  RunOptions o;
  o.seed = 42;
  o.only = {"calmness", "subreg-check", "penalty", "increase-cert"};
  const fs::path a = scratch("seed_a"), b = scratch("seed_b");
  run(cfg, a, o);
  run(cfg, b, o);
  for (const char* f : {"calmness.json", "subreg-check.json", "penalty.json", "increase-cert.json"}) {
    INFO(f);
    CHECK(slurp(a / f) == slurp(b / f));
  }
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST_CASE("point overrides and defaults for absent tasks") {
  const fs::path out = scratch("override");
  RunOptions o;
  o.only = {"feasibility"};
  o.points = std::vector<Vec>{Vec::Constant(1, 0.25)};
  run(load_instance(kFixtures / "worked_example.json"), out, o);
  const Json j = Json::parse(slurp(out / "feasibility.json"));
  CHECK(j.dump().find("0.25") != std::string::npos);
  fs::remove_all(out);
}

TEST_CASE("number formatting") {
  CHECK(format_double(0.1) == "0.10000000000000001");
  CHECK(format_double(2.0) == "2");
  CHECK(format_double(std::numeric_limits<double>::infinity()).empty());
  CHECK(format_double(std::nan("")).empty());
}

TEST_CASE("command-line exit codes") {
  const std::string cli = SVI_CLI_PATH;
  const fs::path out = scratch("cli");
  const std::string worked = (kFixtures / "worked_example.json").string();
  const std::string first = (kFixtures / "first_example.json").string();
  auto status = [&](const std::string& args) {
    const int raw = std::system((cli + " " + args + " --out " + out.string() + " > /dev/null 2>&1").c_str());
    return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  };
  CHECK(status("feasibility --config " + worked) == 0);
  CHECK(fs::exists(out / "feasibility.json"));
  CHECK(status("value-grid --config " + worked + " --p \"0;1\"") == 0);
  CHECK(status("subdiff --config " + (kFixtures / "nope.json").string()) == 2);
  CHECK(status("subdiff --config " + first) == 3);
  fs::remove_all(out);
}
