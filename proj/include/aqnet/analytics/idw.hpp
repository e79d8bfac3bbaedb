#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "aqnet/core/geo.hpp"
#include "aqnet/core/sample.hpp"
#include "aqnet/core/time_series.hpp"

namespace aqnet::analytics {

inline constexpr double kCoincidenceMeters = 0.5;
inline constexpr double kDefaultPower = 2.0;

struct Station {
  GeoPoint location;
  double value;
};

/// Inverse-distance-weighted mean of station values at `q`, weights
/// 1 / d^power with haversine d. Within kCoincidenceMeters of a station the
/// nearest such station's value is returned. Throws ValidationError for an
/// empty list, non-finite values or a non-positive power.
double idw_estimate(std::span<const Station> stations, const GeoPoint& q, double power = kDefaultPower);

struct BoundingBox {
  double lat_min;
  double lon_min;
  double lat_max;
  double lon_max;

  /// Throws ValidationError unless min < max on both axes and all corners are valid coordinates.
  void validate() const;
  bool contains(const GeoPoint& p) const noexcept;
  /// Smallest box around `points`, grown by `pad_fraction` of its extent on
  /// each side (and at least `min_pad_deg`).
  static BoundingBox around(std::span<const GeoPoint> points, double pad_fraction = 0.1, double min_pad_deg = 1e-4);
  /// Parses `lat_min,lon_min,lat_max,lon_max`.
  static std::optional<BoundingBox> parse(std::string_view text);
};

struct StationValue {
  NodeDescriptor node;
  double value;
};

/// Row 0 is the northernmost row, column 0 the westernmost column. Cell
/// (r, c) is centered at lat_max - (r + 0.5) * dlat, lon_min + (c + 0.5) * dlon.
struct InterpolationGrid {
  BoundingBox bbox{};
  int rows = 0;
  int cols = 0;
  Timestamp timestamp = 0;
  Parameter parameter = Parameter::pm10;
  double power = kDefaultPower;
  std::vector<double> values;  // row-major, rows * cols
  std::vector<StationValue> station_values;

  double at(int row, int col) const { return values.at(static_cast<std::size_t>(row * cols + col)); }
  GeoPoint cell_center(int row, int col) const;
  /// Cell containing `p`, or nullopt outside the bbox.
  std::optional<std::pair<int, int>> cell_of(const GeoPoint& p) const;
  /// (row, col) of the largest cell value; the first in row-major order on ties.
  std::pair<int, int> argmax() const;
  double min_value() const;
  double max_value() const;
};

InterpolationGrid idw_grid(std::span<const StationValue> stations, const BoundingBox& bbox, int rows, int cols,
                           double power, Timestamp timestamp, Parameter parameter);

struct NodeSeries {
  NodeDescriptor node;
  TimeSeries series;
};

struct StationSelection {
  std::vector<StationValue> stations;
  /// Nodes with no data in the bucket containing the timestamp, or flagged offline.
  std::vector<NodeDescriptor> excluded;
};

/// Each node's window average for the bucket containing `at`.
StationSelection stations_at(std::span<const NodeSeries> feeds, Timestamp at, const AveragingWindow& window);

/// stations_at followed by idw_grid. Throws InsufficientDataError naming the
/// timestamp when no node has data there.
InterpolationGrid idw_grid_at(std::span<const NodeSeries> feeds, Timestamp at, const AveragingWindow& window,
                              const std::optional<BoundingBox>& bbox, int rows, int cols,
                              double power = kDefaultPower, StationSelection* selection = nullptr);

}  // namespace aqnet::analytics
