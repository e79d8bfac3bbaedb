#include "aqnet/core/geo.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "aqnet/core/errors.hpp"

namespace aqnet {

namespace {
constexpr double kDegToRad = std::numbers::pi / 180.0;
}

GeoPoint::GeoPoint(double lat, double lon) : lat_(lat), lon_(lon) {
  std::map<std::string, std::string> bad;
  if (!std::isfinite(lat) || lat < -90.0 || lat > 90.0) bad["lat"] = "must be within [-90, 90]";
  if (!std::isfinite(lon) || lon < -180.0 || lon > 180.0) bad["lon"] = "must be within [-180, 180]";
  if (!bad.empty()) {
    throw ValidationError("invalid coordinates (" + std::to_string(lat) + ", " + std::to_string(lon) + ")",
                          std::move(bad));
  }
}

double haversine_distance(const GeoPoint& a, const GeoPoint& b) noexcept {
  const double phi1 = a.lat() * kDegToRad;
  const double phi2 = b.lat() * kDegToRad;
  const double dphi = std::abs(a.lat() - b.lat()) * kDegToRad;
  const double dlambda = std::abs(a.lon() - b.lon()) * kDegToRad;

  const double s_phi = std::sin(dphi / 2.0);
  const double s_lambda = std::sin(dlambda / 2.0);
  const double h = s_phi * s_phi + std::cos(phi1) * std::cos(phi2) * s_lambda * s_lambda;
  return 2.0 * kEarthRadiusMeters * std::asin(std::min(1.0, std::sqrt(h)));
}

}  // namespace aqnet
