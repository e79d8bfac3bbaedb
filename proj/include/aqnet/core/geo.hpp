#pragma once

namespace aqnet {

inline constexpr double kEarthRadiusMeters = 6'371'000.0;

/// WGS84 latitude/longitude in degrees. Out-of-range or non-finite
/// coordinates are rejected at construction.
class GeoPoint {
 public:
  GeoPoint(double lat, double lon);

  double lat() const noexcept { return lat_; }
  double lon() const noexcept { return lon_; }

  friend bool operator==(const GeoPoint&, const GeoPoint&) = default;

 private:
  double lat_;
  double lon_;
};

/// Great-circle distance in meters on a sphere of radius kEarthRadiusMeters.
double haversine_distance(const GeoPoint& a, const GeoPoint& b) noexcept;

}  // namespace aqnet
