#include "aqnet/core/time_series.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

#include "aqnet/core/errors.hpp"

namespace aqnet {

TimeSeries::TimeSeries(std::string node_id, Parameter parameter, std::vector<TimePoint> points)
    : node_id_(std::move(node_id)), parameter_(parameter), points_(std::move(points)) {
  for (std::size_t i = 0; i < points_.size(); ++i) {
    if (!std::isfinite(points_[i].value)) {
      throw ValidationError("time series " + node_id_ + " has a non-finite value at index " + std::to_string(i));
    }
    if (i > 0 && points_[i].timestamp <= points_[i - 1].timestamp) {
      throw ValidationError("time series " + node_id_ + " timestamps not strictly increasing at index " +
                            std::to_string(i));
    }
  }
}

std::optional<double> TimeSeries::at(Timestamp t) const {
  const auto it = std::lower_bound(points_.begin(), points_.end(), t,
                                   [](const TimePoint& p, Timestamp ts) { return p.timestamp < ts; });
  if (it == points_.end() || it->timestamp != t) return std::nullopt;
  return it->value;
}

AveragingWindow::AveragingWindow(std::int64_t seconds) : seconds_(seconds) {
  if (seconds <= 0) throw ValidationError("averaging window must be positive", {{"width", "must be > 0"}});
}

std::optional<AveragingWindow> AveragingWindow::parse(std::string_view text) {
  if (text.empty()) return std::nullopt;
  std::int64_t n = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), n);
  if (ec != std::errc{} || n <= 0) return std::nullopt;
  const std::string_view unit(ptr, static_cast<std::size_t>(text.data() + text.size() - ptr));
  std::int64_t scale = 0;
  if (unit.empty() || unit == "s") scale = 1;
  else if (unit == "m" || unit == "min") scale = 60;
  else if (unit == "h") scale = 3'600;
  else if (unit == "d") scale = 86'400;
  else return std::nullopt;
  return AveragingWindow{n * scale};
}

Timestamp AveragingWindow::bucket_start(Timestamp t) const noexcept { return floor_div(t, seconds_) * seconds_; }

std::string AveragingWindow::label() const {
  if (seconds_ % 86'400 == 0) return std::to_string(seconds_ / 86'400) + "d";
  if (seconds_ % 3'600 == 0) return std::to_string(seconds_ / 3'600) + "h";
  if (seconds_ % 60 == 0) return std::to_string(seconds_ / 60) + "m";
  return std::to_string(seconds_) + "s";
}

TimeSeries window_average(const TimeSeries& series, const AveragingWindow& window) {
  std::vector<TimePoint> out;
  const auto& pts = series.points();
  std::size_t i = 0;
  while (i < pts.size()) {
    const Timestamp bucket = window.bucket_start(pts[i].timestamp);
    double sum = 0.0;
    double lo = pts[i].value;
    double hi = pts[i].value;
    std::size_t count = 0;
    for (; i < pts.size() && window.bucket_start(pts[i].timestamp) == bucket; ++i) {
      sum += pts[i].value;
      lo = std::min(lo, pts[i].value);
      hi = std::max(hi, pts[i].value);
      ++count;
    }
    // Clamp so rounding in the sum cannot push the mean outside the bucket's range.
    out.push_back({bucket, std::clamp(sum / static_cast<double>(count), lo, hi)});
  }
  return TimeSeries(series.node_id(), series.parameter(), std::move(out));
}

std::vector<std::pair<double, double>> align_pair(const TimeSeries& x, const TimeSeries& y,
                                                  const AveragingWindow& window) {
  const TimeSeries ax = window_average(x, window);
  const TimeSeries ay = window_average(y, window);
  std::vector<std::pair<double, double>> pairs;
  auto ix = ax.points().begin();
  auto iy = ay.points().begin();
  while (ix != ax.points().end() && iy != ay.points().end()) {
    if (ix->timestamp < iy->timestamp) {
      ++ix;
    } else if (iy->timestamp < ix->timestamp) {
      ++iy;
    } else {
      pairs.emplace_back(ix->value, iy->value);
      ++ix;
      ++iy;
    }
  }
  return pairs;
}

}  // namespace aqnet
