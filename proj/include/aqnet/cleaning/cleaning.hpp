#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "aqnet/core/sample.hpp"
#include "aqnet/core/time_series.hpp"

namespace aqnet::cleaning {

/// (pm25, pm10, temperature, humidity) at one timestamp.
struct FeatureVector {
  Timestamp timestamp = 0;
  std::array<double, 4> features{};
  bool complete = false;
};

FeatureVector to_feature_vector(const SensorSample& sample);

/// Density clustering parameters. Distances are Euclidean over per-batch
/// z-scored features.
struct ClusterParams {
  double eps = 0.1;
  int min_pts = 16;  // neighbours within eps, counting the point itself
  /// The radius used is max(eps, eps_scale times this quantile of the
  /// per-vector distance to the (min_pts - 1)-th nearest other vector).
  /// 0 keeps eps fixed.
  double eps_quantile = 0.5;
  double eps_scale = 2.0;
};

void validate(const ClusterParams& params);

enum class Label { core, border, noise, incomplete };

struct OutlierResult {
  std::vector<Label> labels;  // parallel to the input
  std::optional<std::string> warning;
  double eps = 0.0;  // radius actually used; 0 when detection was skipped

  std::size_t count(Label l) const noexcept;
};

/// Core: at least min_pts complete vectors (itself included) within the
/// radius. Border: not core, but within the radius of a core vector. Noise:
/// neither. The radius is eps, raised per ClusterParams::eps_quantile so that
/// a batch whose typical spacing exceeds eps is not dropped wholesale.
/// Incomplete vectors are labelled `incomplete` and never take part.
/// With fewer than min_pts complete vectors every complete vector is labelled
/// core and a warning is set.
///
/// The noise set depends only on the multiset of inputs, not their order.
OutlierResult detect_outliers(std::span<const FeatureVector> vectors, const ClusterParams& params);

struct CleanOptions {
  ClusterParams cluster;
  /// Epoch-aligned width of each independently cleaned batch.
  std::int64_t batch_seconds = 86'400;
  /// Optional hard cutoff: drop vectors with humidity above this before clustering.
  std::optional<double> rh_max;
};

void validate(const CleanOptions& options);

/// Raw samples of one node, in any order.
struct NodeFeed {
  std::string node_id;
  std::vector<SensorSample> samples;
};

struct CleanedFeed {
  std::string node_id;
  std::map<Parameter, TimeSeries> series;  // one entry per parameter, possibly empty
  std::size_t input_vectors = 0;           // after de-duplication of timestamps
  std::size_t dropped_noise = 0;
  std::size_t dropped_humidity = 0;
  std::vector<Timestamp> dropped_timestamps;
  std::vector<std::string> warnings;

  const TimeSeries& get(Parameter p) const { return series.at(p); }
};

/// Sorts by timestamp, keeping the last sample when timestamps repeat.
std::vector<SensorSample> normalize_samples(std::vector<SensorSample> samples);

/// Drops noise-labelled vectors from all four series at once.
CleanedFeed clean(const NodeFeed& feed, const CleanOptions& options = {});

/// clean() then window_average() of every series.
CleanedFeed pipeline(const NodeFeed& feed, const CleanOptions& options, const AveragingWindow& window);

}  // namespace aqnet::cleaning
