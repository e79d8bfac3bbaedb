#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>

#include "aqnet/core/geo.hpp"
#include "aqnet/core/time.hpp"

namespace aqnet {

enum class Parameter { pm25, pm10, temperature, humidity };

inline constexpr std::array<Parameter, 4> kAllParameters{Parameter::pm25, Parameter::pm10,
                                                         Parameter::temperature, Parameter::humidity};

std::string_view to_string(Parameter p) noexcept;
std::optional<Parameter> parse_parameter(std::string_view name) noexcept;

/// One timestamped reading from one node. Any field may be missing, but not all.
struct SensorSample {
  Timestamp timestamp = 0;
  std::optional<double> pm25;
  std::optional<double> pm10;
  std::optional<double> temperature;
  std::optional<double> humidity;

  const std::optional<double>& get(Parameter p) const noexcept;
  std::optional<double>& get(Parameter p) noexcept;

  bool empty() const noexcept { return !pm25 && !pm10 && !temperature && !humidity; }

  friend bool operator==(const SensorSample&, const SensorSample&) = default;
};

/// Whether `value` is acceptable for parameter `p` (finite; PM >= 0; RH in [0, 100]).
bool is_valid_value(Parameter p, double value) noexcept;

/// Throws ValidationError if the sample violates its invariants.
void validate(const SensorSample& sample);

enum class NodeKind { developed, reference };

std::string_view to_string(NodeKind k) noexcept;
std::optional<NodeKind> parse_node_kind(std::string_view name) noexcept;

struct NodeDescriptor {
  std::string node_id;
  std::string display_name;
  GeoPoint location{0.0, 0.0};
  int channel_id = 0;
  NodeKind kind = NodeKind::developed;
  bool online = true;
};

}  // namespace aqnet
