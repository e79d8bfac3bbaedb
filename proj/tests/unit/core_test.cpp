#include <doctest.h>

#include <cmath>

#include "aqnet/core/errors.hpp"
#include "aqnet/core/geo.hpp"
#include "aqnet/core/number.hpp"
#include "aqnet/core/sample.hpp"
#include "aqnet/core/time.hpp"
#include "aqnet/core/time_series.hpp"
#include "test_support.hpp"

using namespace aqnet;

TEST_CASE("geo_point_rejects_out_of_range") {
  CHECK_THROWS_AS(GeoPoint(91.0, 0.0), ValidationError);
  CHECK_THROWS_AS(GeoPoint(0.0, -180.5), ValidationError);
  CHECK_THROWS_AS(GeoPoint(NAN, 0.0), ValidationError);
  CHECK_NOTHROW(GeoPoint(-90.0, 180.0));
}

TEST_CASE("haversine_identical_points") {
  const GeoPoint p(17.445, 78.349);
  CHECK(haversine_distance(p, p) == 0.0);
}

TEST_CASE("haversine_one_degree_on_equator") {
  const double expected = kEarthRadiusMeters * 3.14159265358979323846 / 180.0;
  const double d = haversine_distance(GeoPoint(0.0, 0.0), GeoPoint(0.0, 1.0));
  CHECK(d == doctest::Approx(expected).epsilon(1e-12));
  CHECK(std::abs(d - 111'195.0) <= 1.0);
}

TEST_CASE("haversine_matches_cosine_law_at_campus_scale") {
  const GeoPoint a(17.4430, 78.3465);
  const GeoPoint b(17.4440, 78.3515);
  const double oracle = testing::cosine_law_distance(17.4430, 78.3465, 17.4440, 78.3515);
  CHECK(std::abs(haversine_distance(a, b) - oracle) < 0.01);
  CHECK(haversine_distance(a, b) == haversine_distance(b, a));
}

TEST_CASE("iso8601_round_trip") {
  CHECK(format_iso8601(0) == "1970-01-01T00:00:00Z");
  const auto t = parse_iso8601("2019-10-27T17:00:00Z");
  REQUIRE(t);
  CHECK(*t == 1'572'195'600);
  CHECK(format_iso8601(*t) == "2019-10-27T17:00:00Z");
  CHECK(parse_iso8601("2019-10-27T22:30:00+05:30") == t);
  CHECK(parse_iso8601("2019-10-27 17:00") == t);
  CHECK(parse_iso8601("2019-10-27T17:00:00.75Z") == t);
  CHECK(format_iso8601(-1) == "1969-12-31T23:59:59Z");
}

TEST_CASE("iso8601_rejects_malformed") {
  CHECK_FALSE(parse_iso8601("2019-13-01T00:00:00Z"));
  CHECK_FALSE(parse_iso8601("2019-02-30T00:00:00Z"));
  CHECK_FALSE(parse_iso8601("2019-10-27T25:00:00Z"));
  CHECK_FALSE(parse_iso8601("yesterday"));
  CHECK_FALSE(parse_iso8601("2019-10-27T17:00:00Zjunk"));
  CHECK(parse_timestamp("1572195600") == 1'572'195'600);
}

TEST_CASE("floor_div_rounds_down") {
  CHECK(floor_div(-1, 300) == -1);
  CHECK(floor_div(-300, 300) == -1);
  CHECK(floor_div(299, 300) == 0);
}

TEST_CASE("number_format_is_shortest_and_round_trips") {
  CHECK(format_number(23.4) == "23.4");
  CHECK(format_number(51.0) == "51");
  CHECK(format_number(-0.0) == "0");
  CHECK(format_number(0.1 + 0.2) == "0.30000000000000004");
  CHECK(parse_number("23.4") == 23.4);
  CHECK_FALSE(parse_number("abc"));
  CHECK_FALSE(parse_number("1.5x"));
  CHECK_FALSE(parse_number("nan"));
  CHECK_FALSE(parse_number("inf"));
  CHECK_FALSE(parse_number(""));
}

TEST_CASE("sample_validation") {
  SensorSample s;
  CHECK_THROWS_AS(validate(s), ValidationError);
  s.pm25 = 12.0;
  CHECK_NOTHROW(validate(s));
  s.humidity = 101.0;
  CHECK_THROWS_AS(validate(s), ValidationError);
  s.humidity = 50.0;
  s.pm10 = -1.0;
  CHECK_THROWS_AS(validate(s), ValidationError);
  CHECK(parse_parameter("pm2.5") == Parameter::pm25);
  CHECK(parse_parameter("humidity") == Parameter::humidity);
  CHECK_FALSE(parse_parameter("co2"));
}

TEST_CASE("time_series_requires_increasing_finite") {
  CHECK_THROWS_AS(TimeSeries("n", Parameter::pm25, {{10, 1.0}, {10, 2.0}}), ValidationError);
  CHECK_THROWS_AS(TimeSeries("n", Parameter::pm25, {{10, 1.0}, {5, 2.0}}), ValidationError);
  CHECK_THROWS_AS(TimeSeries("n", Parameter::pm25, {{10, INFINITY}}), ValidationError);
  const TimeSeries s("n", Parameter::pm25, {{10, 1.0}, {20, 2.0}});
  CHECK(s.at(20) == 2.0);
  CHECK_FALSE(s.at(15));
}

TEST_CASE("averaging_window_parse") {
  CHECK(AveragingWindow::parse("5m")->seconds() == 300);
  CHECK(AveragingWindow::parse("1h")->seconds() == 3600);
  CHECK(AveragingWindow::parse("1d")->seconds() == 86400);
  CHECK(AveragingWindow::parse("90s")->seconds() == 90);
  CHECK(AveragingWindow::parse("600")->seconds() == 600);
  CHECK_FALSE(AveragingWindow::parse("0m"));
  CHECK_FALSE(AveragingWindow::parse("-5m"));
  CHECK_FALSE(AveragingWindow::parse("5 parsecs"));
  CHECK(AveragingWindow::five_minutes().label() == "5m");
  CHECK_THROWS_AS(AveragingWindow(0), ValidationError);
}

TEST_CASE("window_average_constant") {
  std::vector<TimePoint> pts;
  for (Timestamp t = 0; t < 3600; t += 15) pts.push_back({t, 42.0});
  const auto avg = window_average(TimeSeries("n", Parameter::pm10, pts), AveragingWindow::five_minutes());
  CHECK(avg.size() == 12);
  for (const auto& p : avg.points()) CHECK(p.value == 42.0);
}

TEST_CASE("window_average_hand_mean") {
  const TimeSeries s("n", Parameter::pm25, {{300, 10.0}, {420, 20.0}});
  const auto avg = window_average(s, AveragingWindow::five_minutes());
  REQUIRE(avg.size() == 1);
  CHECK(avg.points()[0] == TimePoint{300, 15.0});
}

TEST_CASE("window_average_empty_and_negative_times") {
  CHECK(window_average(TimeSeries("n", Parameter::pm25), AveragingWindow::one_hour()).empty());
  const TimeSeries s("n", Parameter::pm25, {{-10, 4.0}, {-1, 6.0}, {0, 1.0}});
  const auto avg = window_average(s, AveragingWindow::five_minutes());
  REQUIRE(avg.size() == 2);
  CHECK(avg.points()[0] == TimePoint{-300, 5.0});
  CHECK(avg.points()[1] == TimePoint{0, 1.0});
}

TEST_CASE("window_average_stays_within_bucket_range") {
  // Means of equal values must not drift from the value through rounding.
  std::vector<TimePoint> pts;
  for (int i = 0; i < 20; ++i) pts.push_back({i, 0.1});
  const auto avg = window_average(TimeSeries("n", Parameter::pm25, pts), AveragingWindow::five_minutes());
  CHECK(avg.points()[0].value == 0.1);
}

TEST_CASE("align_pair_identical") {
  const TimeSeries s("a", Parameter::pm25, {{0, 1.0}, {300, 2.0}, {600, 3.0}});
  const auto pairs = align_pair(s, s, AveragingWindow::five_minutes());
  REQUIRE(pairs.size() == 3);
  for (const auto& [x, y] : pairs) CHECK(x == y);
}

TEST_CASE("align_pair_disjoint_days") {
  const TimeSeries x("a", Parameter::pm25, {{0, 1.0}, {3600, 2.0}});
  const TimeSeries y("b", Parameter::pm25, {{86'400, 1.0}, {90'000, 2.0}});
  CHECK(align_pair(x, y, AveragingWindow::five_minutes()).empty());
}

TEST_CASE("align_pair_hand_join") {
  const TimeSeries x("a", Parameter::pm25, {{0, 1.0}, {300, 2.0}});
  const TimeSeries y("b", Parameter::pm25, {{300, 9.0}, {600, 7.0}});
  const auto pairs = align_pair(x, y, AveragingWindow::five_minutes());
  REQUIRE(pairs.size() == 1);
  CHECK(pairs[0] == std::pair{2.0, 9.0});
}
