#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "svi/instance.hpp"

namespace svi {

using Json = nlohmann::json;

/// Task types in execution order.
const std::vector<std::string>& task_order();

struct TaskSpec {
  std::string type;
  Json params = Json::object();  // validated keys only

  bool operator==(const TaskSpec&) const = default;
};

struct MapSpec {
  std::string kind;                       // "fan", "affine_plus_cone", "separable_fan"
  std::vector<AffineGenerator> generators;  // fan, or the single (A_p, A_x, b)
  std::vector<std::vector<Vec>> blocks;     // separable_fan: points of each A_i

  bool operator==(const MapSpec& o) const;
};

/// A validated configuration file (see docs/config_schema.md).
struct InstanceConfig {
  std::string name;
  int s = 0, n = 0, m = 0;
  std::vector<Vec> facets;
  MapSpec map;
  std::vector<AffinePiece> pieces;
  std::optional<Mat> quadratic;
  std::vector<TaskSpec> tasks;

  ProblemInstance build() const;
  bool operator==(const InstanceConfig& o) const;
};

/// Errors: "config_syntax" (malformed JSON with line, unknown keys, wrong
/// types), "config_dims" (naming the offending field), "config_task".
InstanceConfig parse_config(const Json& doc);
InstanceConfig parse_config_text(const std::string& text);
InstanceConfig load_instance(const std::filesystem::path& path);

Json emit_instance(const InstanceConfig& cfg);

/// Validates the parameters of one task against the instance dimensions.
TaskSpec parse_task(const Json& task, int s, int n);

/// FNV-1a 64 of the canonical JSON dump, as 16 hex digits.
std::string config_digest(const InstanceConfig& cfg);

}  // namespace svi
