#include "aqnet/sim/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "aqnet/core/errors.hpp"

namespace aqnet::sim {

namespace {
constexpr double kDhtResolution = 0.1;

double daily_phase(const AmbientProfile& a, Timestamp t) noexcept {
  const double s = static_cast<double>(t - floor_div(t, kSecondsPerDay) * kSecondsPerDay);
  return std::cos(2.0 * std::numbers::pi * (s - a.peak_offset) / static_cast<double>(kSecondsPerDay));
}
}  // namespace

void validate(const NoiseModel& n) {
  std::map<std::string, std::string> bad;
  const auto check = [&](const char* name, double v) {
    if (!std::isfinite(v) || v < 0) bad[name] = "must be >= 0";
  };
  check("relative_error", n.relative_error);
  check("absolute_error", n.absolute_error);
  check("resolution", n.resolution);
  check("temp_error", n.temp_error);
  check("humidity_error", n.humidity_error);
  if (!bad.empty()) throw ValidationError("invalid noise model", std::move(bad));
}

void validate(const AmbientProfile& a) {
  std::map<std::string, std::string> bad;
  if (!(a.temperature_min <= a.temperature_max)) bad["temperature_max"] = "must be >= temperature_min";
  if (!(a.humidity_min <= a.humidity_max)) bad["humidity_max"] = "must be >= humidity_min";
  if (a.humidity_min < 0 || a.humidity_max > 100) bad["humidity_min"] = "humidity must stay within [0, 100]";
  if (!std::isfinite(a.peak_offset)) bad["peak_offset"] = "must be finite";
  if (!bad.empty()) throw ValidationError("invalid ambient profile", std::move(bad));
}

double ambient_temperature(const AmbientProfile& a, Timestamp t) noexcept {
  const double mid = (a.temperature_min + a.temperature_max) / 2.0;
  return mid + (a.temperature_max - a.temperature_min) / 2.0 * daily_phase(a, t);
}

double ambient_humidity(const AmbientProfile& a, Timestamp t) noexcept {
  const double mid = (a.humidity_min + a.humidity_max) / 2.0;
  return mid - (a.humidity_max - a.humidity_min) / 2.0 * daily_phase(a, t);
}

SampleRng::SampleRng(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  engine_.seed(seq);
}

double SampleRng::uniform(double lo, double hi) noexcept {
  const double unit = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  return lo + (hi - lo) * unit;
}

double quantize(double value, double resolution) noexcept {
  if (resolution <= 0.0) return value;
  const double k = std::round(value / resolution);
  return std::round(k * resolution * 1e6) / 1e6;
}

std::optional<SensorSample> sample_node(const NodeDescriptor& node, const NoiseModel& noise,
                                        const PollutionField& field, const AmbientProfile& ambient, Timestamp t,
                                        SampleRng& rng) {
  if (!node.online) return std::nullopt;
  SensorSample s;
  s.timestamp = t;
  for (const Parameter p : {Parameter::pm25, Parameter::pm10}) {
    const double v = field_value(field, node.location, t, p);
    const double envelope = std::max(noise.relative_error * v, noise.absolute_error);
    const double eps = rng.uniform(-envelope, envelope);
    s.get(p) = quantize(std::max(0.0, v + eps), noise.resolution);
  }
  const double te = rng.uniform(-noise.temp_error, noise.temp_error);
  s.temperature = quantize(ambient_temperature(ambient, t) + te, kDhtResolution);
  const double he = rng.uniform(-noise.humidity_error, noise.humidity_error);
  s.humidity = std::clamp(quantize(ambient_humidity(ambient, t) + he, kDhtResolution), 0.0, 100.0);
  return s;
}

}  // namespace aqnet::sim
