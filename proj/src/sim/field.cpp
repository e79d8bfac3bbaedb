#include "aqnet/sim/field.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "aqnet/core/errors.hpp"

namespace aqnet::sim {

void validate(const BurstEvent& e) {
  std::map<std::string, std::string> bad;
  if (!std::isfinite(e.amplitude_pm25) || e.amplitude_pm25 < 0) bad["amplitude_pm25"] = "must be >= 0";
  if (!std::isfinite(e.amplitude_pm10) || e.amplitude_pm10 < 0) bad["amplitude_pm10"] = "must be >= 0";
  if (!std::isfinite(e.sigma) || e.sigma <= 0) bad["sigma"] = "must be > 0";
  if (!std::isfinite(e.ramp) || e.ramp < 0) bad["ramp"] = "must be >= 0";
  if (!std::isfinite(e.half_life) || e.half_life <= 0) bad["half_life"] = "must be > 0";
  if (!bad.empty()) throw ValidationError("invalid burst event", std::move(bad));
}

double temporal_factor(const BurstEvent& e, Timestamp t) noexcept {
  const double dt = static_cast<double>(t - e.onset);
  if (dt < 0) return 0.0;
  if (dt < e.ramp) return dt / e.ramp;
  return std::exp2(-(dt - e.ramp) / e.half_life);
}

void validate(const PollutionField& f) {
  std::map<std::string, std::string> bad;
  const auto check = [&](const char* name, double v) {
    if (!std::isfinite(v) || v < 0) bad[name] = "must be finite and >= 0";
  };
  check("baseline_pm25", f.baseline_pm25);
  check("baseline_pm10", f.baseline_pm10);
  check("diurnal_amplitude_pm25", f.diurnal_amplitude_pm25);
  check("diurnal_amplitude_pm10", f.diurnal_amplitude_pm10);
  if (!std::isfinite(f.diurnal_phase)) bad["diurnal_phase"] = "must be finite";
  if (f.baseline_pm25 < f.diurnal_amplitude_pm25) bad["diurnal_amplitude_pm25"] = "must not exceed baseline_pm25";
  if (f.baseline_pm10 < f.diurnal_amplitude_pm10) bad["diurnal_amplitude_pm10"] = "must not exceed baseline_pm10";
  for (std::size_t i = 0; i < f.events.size(); ++i) {
    try {
      validate(f.events[i]);
    } catch (const ValidationError& e) {
      for (const auto& [k, v] : e.fields()) bad["events[" + std::to_string(i) + "]." + k] = v;
    }
  }
  if (!bad.empty()) throw ValidationError("invalid pollution field", std::move(bad));
}

double field_value(const PollutionField& f, const GeoPoint& p, Timestamp t, Parameter parameter) {
  if (parameter != Parameter::pm25 && parameter != Parameter::pm10) {
    throw std::invalid_argument("field_value is defined for pm25 and pm10 only");
  }
  const bool fine = parameter == Parameter::pm25;
  const double baseline = fine ? f.baseline_pm25 : f.baseline_pm10;
  const double diurnal = fine ? f.diurnal_amplitude_pm25 : f.diurnal_amplitude_pm10;

  const double seconds_of_day = static_cast<double>(t - floor_div(t, kSecondsPerDay) * kSecondsPerDay);
  double value = baseline + diurnal * std::sin(2.0 * std::numbers::pi * (seconds_of_day - f.diurnal_phase) /
                                               static_cast<double>(kSecondsPerDay));
  for (const BurstEvent& e : f.events) {
    const double amplitude = fine ? e.amplitude_pm25 : e.amplitude_pm10;
    const double g = temporal_factor(e, t);
    if (amplitude == 0.0 || g == 0.0) continue;
    const double d = haversine_distance(p, e.center);
    value += amplitude * std::exp(-(d * d) / (2.0 * e.sigma * e.sigma)) * g;
  }
  return std::max(0.0, value);
}

}  // namespace aqnet::sim
