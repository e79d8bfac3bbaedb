#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "aqnet/core/sample.hpp"
#include "aqnet/sim/field.hpp"
#include "aqnet/sim/sampler.hpp"

namespace aqnet::sim {

struct NodeConfig {
  NodeDescriptor descriptor;
  NoiseModel noise;
};

/// A simulated deployment. Field names double as the scenario-file keys.
struct ScenarioConfig {
  std::vector<NodeConfig> nodes;
  PollutionField field;
  AmbientProfile ambient;
  Timestamp start = 0;
  Timestamp end = 0;
  std::int64_t sample_interval = 15;  // seconds
  double speedup = 1.0;               // simulated seconds per wall second
  std::uint64_t rng_seed = 0;
  std::string server_url = "http://127.0.0.1:8080";

  /// Index of the node with this id, or -1.
  int find_node(std::string_view node_id) const noexcept;
};

/// Throws ValidationError naming the offending fields.
void validate(const ScenarioConfig& config);

/// Parses a JSON scenario document. Errors are ValidationError whose message
/// names the offending key path, e.g. "scenario: missing required key `nodes`".
/// Timestamps may be ISO-8601 strings or integer epoch seconds.
ScenarioConfig parse_scenario(std::string_view text);
ScenarioConfig load_scenario(const std::filesystem::path& path);
std::string dump_scenario(const ScenarioConfig& config);

BurstEvent parse_burst_event(std::string_view json_text, Timestamp default_onset);

}  // namespace aqnet::sim
