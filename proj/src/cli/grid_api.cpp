#include "aqnet/cli/grid_api.hpp"

#include <charconv>
#include <json.hpp>

#include "aqnet/analytics/export.hpp"
#include "aqnet/analytics/idw.hpp"
#include "aqnet/core/errors.hpp"
#include "aqnet/core/number.hpp"

namespace aqnet::cli {

using nlohmann::json;

namespace {

template <typename T>
T numeric_param(const http::Request& req, const std::string& name, T fallback) {
  const auto raw = req.param(name);
  if (!raw || raw->empty()) return fallback;
  const auto v = parse_number(*raw);
  if (!v) throw ValidationError("malformed " + name, {{name, "expected a number"}});
  return static_cast<T>(*v);
}

}  // namespace

void mount_grid_routes(http::Server& server, const ingest::ChannelStore& store, cleaning::CleanOptions options) {
  cleaning::validate(options);
  server.get(R"(/analytics/idw\.json)", [&store, options](const http::Request& req) {
    const auto param = parse_parameter(req.param("param").value_or("pm10"));
    if (!param || (*param != Parameter::pm25 && *param != Parameter::pm10)) {
      throw ValidationError("unsupported parameter", {{"param", "must be pm25 or pm10"}});
    }
    const auto window = AveragingWindow::parse(req.param("window").value_or("5m"));
    if (!window) throw ValidationError("malformed window", {{"window", "expected 5m, 1h, 1d or <n>s|m|h|d"}});
    std::optional<analytics::BoundingBox> bbox;
    if (const auto raw = req.param("bbox"); raw && !raw->empty()) {
      bbox = analytics::BoundingBox::parse(*raw);
      if (!bbox) throw ValidationError("malformed bbox", {{"bbox", "expected lat_min,lon_min,lat_max,lon_max"}});
    }
    const int rows = numeric_param(req, "rows", 50);
    const int cols = numeric_param(req, "cols", 50);
    const double power = numeric_param(req, "power", analytics::kDefaultPower);

    std::optional<Timestamp> at;
    if (const auto raw = req.param("at"); raw && !raw->empty()) {
      at = parse_timestamp(*raw);
      if (!at) throw ValidationError("malformed at", {{"at", "expected ISO-8601 UTC or epoch seconds"}});
    }

    const auto channels = store.channels();
    if (!at) {
      for (const auto& c : channels) {
        if (const auto last = store.latest(c.channel_id)) {
          at = std::max(at.value_or(last->sample.timestamp), last->sample.timestamp);
        }
      }
      if (!at) return http::Response::json(422, json{{"error", "no data in any channel"}}.dump());
    }

    // Cleaning runs per batch, so only the batch holding `at` is needed.
    const Timestamp batch0 = floor_div(*at, options.batch_seconds) * options.batch_seconds;
    std::vector<analytics::NodeSeries> feeds;
    for (const auto& c : channels) {
      cleaning::NodeFeed feed{c.node_id, {}};
      for (const auto& e : store.range(c.channel_id, batch0, batch0 + options.batch_seconds)) {
        feed.samples.push_back(e.sample);
      }
      NodeDescriptor node;
      node.node_id = c.node_id;
      node.display_name = c.display_name;
      node.location = c.location;
      node.channel_id = c.channel_id;
      node.kind = c.kind;
      feeds.push_back({node, cleaning::clean(feed, options).get(*param)});
    }
    if (feeds.empty()) return http::Response::json(422, json{{"error", "no channels registered"}}.dump());

    analytics::StationSelection sel;
    try {
      const auto grid = analytics::idw_grid_at(feeds, *at, *window, bbox, rows, cols, power, &sel);
      const json body{{"metadata", json::parse(analytics::grid_metadata_json(grid, sel.excluded))},
                      {"grid", json::parse(analytics::grid_to_geojson(grid))}};
      return http::Response::json(200, body.dump());
    } catch (const InsufficientDataError& e) {
      return http::Response::json(422, json{{"error", e.what()}}.dump());
    }
  });
}

}  // namespace aqnet::cli
