#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "svi/config.hpp"

namespace svi {

inline constexpr const char* kToolVersion = "0.3.0";

struct RunOptions {
  std::uint64_t seed = 1;
  bool parallel = false;
  /// Replaces the "points" of every task that takes parameter points.
  std::optional<std::vector<Vec>> points;
  /// Restricts the run to these task types (empty: every task in the config).
  /// A listed type absent from the config runs with default parameters.
  std::set<std::string> only;
};

struct TaskOutcome {
  std::string type;
  std::string quantity;  // the quantity the task audits, e.g. "val"
  std::string status;    // "ok", "violations" or "failed"
  std::string error;     // error code when failed
  std::string artifact;  // file name inside the output directory
};

struct RunReport {
  std::string tool_version;
  std::string config_digest;
  std::uint64_t seed = 0;
  double wall_time_s = 0.0;
  std::vector<TaskOutcome> tasks;

  bool all_ok() const;
};

/// Executes the configured tasks in task_order(), writing one CSV or JSON
/// artifact per task and run.json into out_dir. A failing task is recorded and
/// the remaining tasks still run.
RunReport run(const InstanceConfig& cfg, const std::filesystem::path& out_dir, const RunOptions& opts = {});

/// Formats a double with 17 significant digits ("" for non-finite values).
std::string format_double(double v);

}  // namespace svi
