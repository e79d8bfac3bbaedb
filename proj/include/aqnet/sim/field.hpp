#pragma once

#include <cstdint>
#include <vector>

#include "aqnet/core/geo.hpp"
#include "aqnet/core/sample.hpp"
#include "aqnet/core/time.hpp"

namespace aqnet::sim {

/// A localized, time-decaying pollution source (firecracker plume).
///
/// Spatial profile is Gaussian in great-circle distance from `center`.
/// Temporal profile: 0 before onset, linear ramp to 1 over `ramp` seconds,
/// then exponential decay with the given half-life.
struct BurstEvent {
  std::int64_t id = 0;  // assigned on injection; 0 for events declared in a scenario file
  GeoPoint center{0.0, 0.0};
  double amplitude_pm25 = 0.0;
  double amplitude_pm10 = 0.0;
  double sigma = 80.0;  // meters
  Timestamp onset = 0;
  double ramp = 0.0;          // seconds
  double half_life = 3600.0;  // seconds

  friend bool operator==(const BurstEvent&, const BurstEvent&) = default;
};

/// Throws ValidationError naming every offending field.
void validate(const BurstEvent& event);

/// g(t) in [0, 1].
double temporal_factor(const BurstEvent& event, Timestamp t) noexcept;

struct PollutionField {
  double baseline_pm25 = 30.0;
  double baseline_pm10 = 60.0;
  double diurnal_amplitude_pm25 = 0.0;
  double diurnal_amplitude_pm10 = 0.0;
  double diurnal_phase = 0.0;  // seconds into the UTC day
  std::vector<BurstEvent> events;
};

void validate(const PollutionField& field);

/// Ground-truth concentration of pm25 or pm10 at `p`, time `t`; never negative.
/// Throws std::invalid_argument for non-PM parameters.
double field_value(const PollutionField& field, const GeoPoint& p, Timestamp t, Parameter parameter);

}  // namespace aqnet::sim
