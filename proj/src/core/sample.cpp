#include "aqnet/core/sample.hpp"

#include <cmath>
#include <utility>

#include "aqnet/core/errors.hpp"

namespace aqnet {

std::string_view to_string(Parameter p) noexcept {
  switch (p) {
    case Parameter::pm25: return "pm25";
    case Parameter::pm10: return "pm10";
    case Parameter::temperature: return "temperature";
    case Parameter::humidity: return "humidity";
  }
  return "unknown";
}

std::optional<Parameter> parse_parameter(std::string_view name) noexcept {
  for (const Parameter p : kAllParameters) {
    if (to_string(p) == name) return p;
  }
  if (name == "pm2.5") return Parameter::pm25;
  return std::nullopt;
}

const std::optional<double>& SensorSample::get(Parameter p) const noexcept {
  switch (p) {
    case Parameter::pm25: return pm25;
    case Parameter::pm10: return pm10;
    case Parameter::temperature: return temperature;
    case Parameter::humidity: break;
  }
  return humidity;
}

std::optional<double>& SensorSample::get(Parameter p) noexcept {
  return const_cast<std::optional<double>&>(std::as_const(*this).get(p));
}

bool is_valid_value(Parameter p, double value) noexcept {
  if (!std::isfinite(value)) return false;
  switch (p) {
    case Parameter::pm25:
    case Parameter::pm10: return value >= 0.0;
    case Parameter::temperature: return true;
    case Parameter::humidity: return value >= 0.0 && value <= 100.0;
  }
  return false;
}

void validate(const SensorSample& sample) {
  if (sample.empty()) throw ValidationError("sample has no fields");
  std::map<std::string, std::string> bad;
  for (const Parameter p : kAllParameters) {
    const auto& v = sample.get(p);
    if (v && !is_valid_value(p, *v)) bad[std::string(to_string(p))] = "out of range";
  }
  if (!bad.empty()) throw ValidationError("invalid sample", std::move(bad));
}

std::string_view to_string(NodeKind k) noexcept {
  return k == NodeKind::reference ? "reference" : "developed";
}

std::optional<NodeKind> parse_node_kind(std::string_view name) noexcept {
  if (name == "developed") return NodeKind::developed;
  if (name == "reference") return NodeKind::reference;
  return std::nullopt;
}

}  // namespace aqnet
