#pragma once

#include <cstdint>
#include <optional>
#include <random>

#include "aqnet/core/sample.hpp"
#include "aqnet/sim/field.hpp"

namespace aqnet::sim {

/// Bounded measurement error of one node. PM error is uniform within
/// +/- max(relative_error * v, absolute_error).
struct NoiseModel {
  double relative_error = 0.15;
  double absolute_error = 10.0;  // ug/m3
  double resolution = 0.3;       // ug/m3; 0 disables quantization
  double temp_error = 0.5;       // degC
  double humidity_error = 2.0;   // percent RH

  friend bool operator==(const NoiseModel&, const NoiseModel&) = default;
};

void validate(const NoiseModel& noise);

/// Sinusoidal daily temperature/humidity. Temperature peaks and humidity
/// bottoms out at `peak_offset` seconds into the UTC day.
struct AmbientProfile {
  double temperature_min = 10.0;
  double temperature_max = 30.0;
  double humidity_min = 30.0;
  double humidity_max = 80.0;
  double peak_offset = 9.0 * 3600.0;  // 14:30 IST

  friend bool operator==(const AmbientProfile&, const AmbientProfile&) = default;
};

void validate(const AmbientProfile& ambient);

double ambient_temperature(const AmbientProfile& ambient, Timestamp t) noexcept;
double ambient_humidity(const AmbientProfile& ambient, Timestamp t) noexcept;

/// Deterministic per-node random stream. mt19937_64 and seed_seq are fully
/// specified by the standard, and uniform() is derived from raw bits, so a
/// (seed, stream) pair yields the same draws on every platform.
class SampleRng {
 public:
  SampleRng(std::uint64_t seed, std::uint64_t stream);

  /// Uniform in [lo, hi).
  double uniform(double lo, double hi) noexcept;

 private:
  std::mt19937_64 engine_;
};

/// Nearest multiple of `resolution` (cleaned to the nearest 1e-6 so values
/// print as short decimals). resolution <= 0 returns `value` unchanged.
double quantize(double value, double resolution) noexcept;

/// One reading of `node` at time `t`; nullopt when the node is offline.
/// Draw order per call: pm25, pm10, temperature, humidity error.
std::optional<SensorSample> sample_node(const NodeDescriptor& node, const NoiseModel& noise,
                                        const PollutionField& field, const AmbientProfile& ambient, Timestamp t,
                                        SampleRng& rng);

}  // namespace aqnet::sim
