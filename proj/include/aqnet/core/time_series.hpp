#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "aqnet/core/sample.hpp"
#include "aqnet/core/time.hpp"

namespace aqnet {

struct TimePoint {
  Timestamp timestamp;
  double value;

  friend bool operator==(const TimePoint&, const TimePoint&) = default;
};

/// Values of one parameter from one node, strictly increasing in time.
class TimeSeries {
 public:
  TimeSeries(std::string node_id, Parameter parameter, std::vector<TimePoint> points = {});

  const std::string& node_id() const noexcept { return node_id_; }
  Parameter parameter() const noexcept { return parameter_; }
  const std::vector<TimePoint>& points() const noexcept { return points_; }
  std::size_t size() const noexcept { return points_.size(); }
  bool empty() const noexcept { return points_.empty(); }

  /// Value at exactly `t`, if present.
  std::optional<double> at(Timestamp t) const;

  friend bool operator==(const TimeSeries&, const TimeSeries&) = default;

 private:
  std::string node_id_;
  Parameter parameter_;
  std::vector<TimePoint> points_;
};

/// Width of an epoch-aligned averaging bucket.
class AveragingWindow {
 public:
  explicit AveragingWindow(std::int64_t seconds);

  static AveragingWindow five_minutes() { return AveragingWindow{300}; }
  static AveragingWindow one_hour() { return AveragingWindow{3'600}; }
  static AveragingWindow one_day() { return AveragingWindow{86'400}; }

  /// Accepts `5m`, `1h`, `1d`, `<n>s|m|h|d`, or a bare number of seconds.
  static std::optional<AveragingWindow> parse(std::string_view text);

  std::int64_t seconds() const noexcept { return seconds_; }
  Timestamp bucket_start(Timestamp t) const noexcept;
  std::string label() const;

  friend bool operator==(const AveragingWindow&, const AveragingWindow&) = default;

 private:
  std::int64_t seconds_;
};

/// Arithmetic mean per bucket, stamped with the bucket start. Empty buckets are omitted.
TimeSeries window_average(const TimeSeries& series, const AveragingWindow& window);

/// Window-averages both series and inner-joins them on bucket start.
std::vector<std::pair<double, double>> align_pair(const TimeSeries& x, const TimeSeries& y,
                                                  const AveragingWindow& window);

}  // namespace aqnet
