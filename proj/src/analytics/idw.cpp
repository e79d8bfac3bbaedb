#include "aqnet/analytics/idw.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "aqnet/core/errors.hpp"
#include "aqnet/core/number.hpp"

namespace aqnet::analytics {

double idw_estimate(std::span<const Station> stations, const GeoPoint& q, double power) {
  if (stations.empty()) throw ValidationError("idw_estimate: no stations");
  if (!(power > 0.0) || !std::isfinite(power)) throw ValidationError("idw_estimate: power must be > 0", {{"power", "must be > 0"}});

  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  double nearest = std::numeric_limits<double>::infinity();
  double nearest_value = 0.0;
  std::vector<double> dist(stations.size());
  for (std::size_t i = 0; i < stations.size(); ++i) {
    const double v = stations[i].value;
    if (!std::isfinite(v)) throw ValidationError("idw_estimate: non-finite station value at index " + std::to_string(i));
    lo = std::min(lo, v);
    hi = std::max(hi, v);
    dist[i] = haversine_distance(q, stations[i].location);
    if (dist[i] < nearest) {
      nearest = dist[i];
      nearest_value = v;
    }
  }
  if (nearest < kCoincidenceMeters) return nearest_value;

  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < stations.size(); ++i) {
    const double w = std::pow(dist[i], -power);
    num += w * stations[i].value;
    den += w;
  }
  // A convex combination; the clamp only absorbs rounding.
  return std::clamp(num / den, lo, hi);
}

void BoundingBox::validate() const {
  std::map<std::string, std::string> bad;
  for (const double v : {lat_min, lon_min, lat_max, lon_max}) {
    if (!std::isfinite(v)) bad["bbox"] = "coordinates must be finite";
  }
  if (bad.empty()) {
    if (!(lat_min < lat_max)) bad["lat"] = "lat_min must be < lat_max";
    if (!(lon_min < lon_max)) bad["lon"] = "lon_min must be < lon_max";
    if (lat_min < -90.0 || lat_max > 90.0) bad["lat"] = "latitude out of range";
    if (lon_min < -180.0 || lon_max > 180.0) bad["lon"] = "longitude out of range";
  }
  if (!bad.empty()) throw ValidationError("invalid bounding box", std::move(bad));
}

bool BoundingBox::contains(const GeoPoint& p) const noexcept {
  return p.lat() >= lat_min && p.lat() <= lat_max && p.lon() >= lon_min && p.lon() <= lon_max;
}

BoundingBox BoundingBox::around(std::span<const GeoPoint> points, double pad_fraction, double min_pad_deg) {
  if (points.empty()) throw ValidationError("bounding box of no points");
  BoundingBox b{points[0].lat(), points[0].lon(), points[0].lat(), points[0].lon()};
  for (const auto& p : points) {
    b.lat_min = std::min(b.lat_min, p.lat());
    b.lat_max = std::max(b.lat_max, p.lat());
    b.lon_min = std::min(b.lon_min, p.lon());
    b.lon_max = std::max(b.lon_max, p.lon());
  }
  const double pad_lat = std::max((b.lat_max - b.lat_min) * pad_fraction, min_pad_deg);
  const double pad_lon = std::max((b.lon_max - b.lon_min) * pad_fraction, min_pad_deg);
  b.lat_min = std::max(-90.0, b.lat_min - pad_lat);
  b.lat_max = std::min(90.0, b.lat_max + pad_lat);
  b.lon_min = std::max(-180.0, b.lon_min - pad_lon);
  b.lon_max = std::min(180.0, b.lon_max + pad_lon);
  return b;
}

std::optional<BoundingBox> BoundingBox::parse(std::string_view text) {
  double v[4];
  for (int i = 0; i < 4; ++i) {
    const auto comma = text.find(',');
    if ((i < 3) == (comma == std::string_view::npos)) return std::nullopt;
    const auto n = parse_number(text.substr(0, comma));
    if (!n) return std::nullopt;
    v[i] = *n;
    text = comma == std::string_view::npos ? std::string_view{} : text.substr(comma + 1);
  }
  return BoundingBox{v[0], v[1], v[2], v[3]};
}

GeoPoint InterpolationGrid::cell_center(int row, int col) const {
  const double dlat = (bbox.lat_max - bbox.lat_min) / rows;
  const double dlon = (bbox.lon_max - bbox.lon_min) / cols;
  return GeoPoint(bbox.lat_max - (row + 0.5) * dlat, bbox.lon_min + (col + 0.5) * dlon);
}

std::optional<std::pair<int, int>> InterpolationGrid::cell_of(const GeoPoint& p) const {
  if (!bbox.contains(p)) return std::nullopt;
  const double fr = (bbox.lat_max - p.lat()) / (bbox.lat_max - bbox.lat_min) * rows;
  const double fc = (p.lon() - bbox.lon_min) / (bbox.lon_max - bbox.lon_min) * cols;
  return std::pair{std::clamp(static_cast<int>(fr), 0, rows - 1), std::clamp(static_cast<int>(fc), 0, cols - 1)};
}

std::pair<int, int> InterpolationGrid::argmax() const {
  const auto it = std::max_element(values.begin(), values.end());
  const auto idx = static_cast<int>(it - values.begin());
  return {idx / cols, idx % cols};
}

double InterpolationGrid::min_value() const { return *std::min_element(values.begin(), values.end()); }
double InterpolationGrid::max_value() const { return *std::max_element(values.begin(), values.end()); }

InterpolationGrid idw_grid(std::span<const StationValue> stations, const BoundingBox& bbox, int rows, int cols,
                           double power, Timestamp timestamp, Parameter parameter) {
  std::map<std::string, std::string> bad;
  if (rows < 2) bad["rows"] = "must be >= 2";
  if (cols < 2) bad["cols"] = "must be >= 2";
  if (!bad.empty()) throw ValidationError("invalid grid dimensions", std::move(bad));
  bbox.validate();
  if (stations.empty()) {
    throw InsufficientDataError("no online stations with data at " + format_iso8601(timestamp));
  }

  std::vector<Station> points;
  points.reserve(stations.size());
  for (const auto& s : stations) points.push_back({s.node.location, s.value});

  InterpolationGrid g;
  g.bbox = bbox;
  g.rows = rows;
  g.cols = cols;
  g.timestamp = timestamp;
  g.parameter = parameter;
  g.power = power;
  g.station_values.assign(stations.begin(), stations.end());
  g.values.resize(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols));
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      g.values[static_cast<std::size_t>(r * cols + c)] = idw_estimate(points, g.cell_center(r, c), power);
    }
  }
  return g;
}

StationSelection stations_at(std::span<const NodeSeries> feeds, Timestamp at, const AveragingWindow& window) {
  StationSelection sel;
  const Timestamp bucket = window.bucket_start(at);
  for (const auto& f : feeds) {
    std::optional<double> v;
    if (f.node.online) v = window_average(f.series, window).at(bucket);
    if (v) {
      sel.stations.push_back({f.node, *v});
    } else {
      sel.excluded.push_back(f.node);
    }
  }
  return sel;
}

InterpolationGrid idw_grid_at(std::span<const NodeSeries> feeds, Timestamp at, const AveragingWindow& window,
                              const std::optional<BoundingBox>& bbox, int rows, int cols, double power,
                              StationSelection* selection) {
  StationSelection sel = stations_at(feeds, at, window);
  if (sel.stations.empty()) {
    throw InsufficientDataError("no online stations with data at " + format_iso8601(at) + " (window " +
                                window.label() + ")");
  }
  BoundingBox box{};
  if (bbox) {
    box = *bbox;
  } else {
    std::vector<GeoPoint> locations;
    for (const auto& f : feeds) locations.push_back(f.node.location);
    box = BoundingBox::around(locations);
  }
  const Parameter parameter = feeds.front().series.parameter();
  InterpolationGrid g = idw_grid(sel.stations, box, rows, cols, power, window.bucket_start(at), parameter);
  if (selection) *selection = std::move(sel);
  return g;
}

}  // namespace aqnet::analytics
