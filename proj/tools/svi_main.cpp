// Command-line front end: `svi <verb> --config FILE [--out DIR] [--seed N] [--p "v1,v2"] [--parallel]`.

#include <cstdlib>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>

#include "svi/runner.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitTask = 3;

// "1,2;3,4" -> two points; a point without ';' separators is one vector.
std::vector<svi::Vec> parse_points(const std::string& text) {
  std::vector<svi::Vec> out;
  std::stringstream groups(text);
  std::string group;
  while (std::getline(groups, group, ';')) {
    std::vector<double> vals;
    std::stringstream items(group);
    std::string item;
    while (std::getline(items, item, ',')) {
      std::size_t used = 0;
      vals.push_back(std::stod(item, &used));
      if (item.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(item);
    }
    out.push_back(Eigen::Map<svi::Vec>(vals.data(), static_cast<Eigen::Index>(vals.size())));
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Parametric optimisation with set-valued inclusion constraints"};
  app.require_subcommand(1);

  const std::map<std::string, std::string> verbs = {
      {"feasibility", "feasibility"},     {"value-grid", "value-grid"},
      {"subdiff", "subdiff"},             {"increase-cert", "increase-cert"},
      {"audit-error-bound", "error-bound-audit"}, {"penalty", "penalty"},
      {"calmness", "calmness"},           {"subreg", "subreg-check"},
      {"run-all", ""}};

  std::string config_path, out_dir = "out", points_text;
  std::uint64_t seed = 1;
  bool parallel = false;
  for (const auto& [verb, task] : verbs) {
    CLI::App* sub = app.add_subcommand(verb, task.empty() ? "run every task in the config" : "run the " + task + " task");
    sub->add_option("--config", config_path, "instance configuration (JSON)")->required();
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--seed", seed, "seed for sampled audits (SVI_SEED overrides)");
    sub->add_option("--p", points_text, "parameter points, e.g. \"0\" or \"1,2;3,4\"");
    sub->add_flag("--parallel", parallel, "evaluate grid points in parallel");
  }
  CLI11_PARSE(app, argc, argv);

  svi::RunOptions opts;
  opts.parallel = parallel;
  opts.seed = seed;
  if (const char* env = std::getenv("SVI_SEED")) {
    try {
      opts.seed = std::stoull(env);
    } catch (const std::exception&) {
      std::cerr << "error: SVI_SEED is not an unsigned integer\n";
      return kExitConfig;
    }
  }
  const std::string verb = app.get_subcommands().front()->get_name();
  if (!verbs.at(verb).empty()) opts.only = {verbs.at(verb)};

  svi::InstanceConfig cfg;
  try {
    cfg = svi::load_instance(config_path);
    if (!points_text.empty()) {
      opts.points = parse_points(points_text);
      for (const svi::Vec& p : *opts.points) {
        if (p.size() != cfg.s) throw svi::Error("config_dims", "--p: point length differs from dims.s");
      }
    }
  } catch (const svi::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::invalid_argument&) {
    std::cerr << "error: config_syntax: --p must be comma-separated numbers\n";
    return kExitConfig;
  }

  const svi::RunReport rep = svi::run(cfg, out_dir, opts);
  for (const svi::TaskOutcome& t : rep.tasks) {
    std::cout << t.type << ": " << t.status;
    if (!t.error.empty()) std::cout << " (" << t.error << ")";
    if (!t.artifact.empty()) std::cout << " -> " << out_dir << "/" << t.artifact;
    std::cout << "\n";
  }
  return rep.all_ok() ? 0 : kExitTask;
}
