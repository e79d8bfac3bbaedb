#include "aqnet/analytics/export.hpp"

#include <fstream>
#include <json.hpp>

#include "aqnet/core/errors.hpp"
#include "aqnet/core/number.hpp"

namespace aqnet::analytics {

using nlohmann::json;

namespace {

json bbox_json(const BoundingBox& b) {
  return {{"lat_min", b.lat_min}, {"lon_min", b.lon_min}, {"lat_max", b.lat_max}, {"lon_max", b.lon_max}};
}

json node_json(const NodeDescriptor& n) {
  return {{"node_id", n.node_id},
          {"channel_id", n.channel_id},
          {"latitude", n.location.lat()},
          {"longitude", n.location.lon()}};
}

}  // namespace

std::string grid_to_geojson(const InterpolationGrid& grid) {
  const std::string ts = format_iso8601(grid.timestamp);
  const std::string param{to_string(grid.parameter)};
  json features = json::array();
  for (int r = 0; r < grid.rows; ++r) {
    for (int c = 0; c < grid.cols; ++c) {
      const GeoPoint p = grid.cell_center(r, c);
      features.push_back({{"type", "Feature"},
                          {"geometry", {{"type", "Point"}, {"coordinates", {p.lon(), p.lat()}}}},
                          {"properties",
                           {{"parameter", param}, {"value", grid.at(r, c)}, {"timestamp", ts}, {"row", r}, {"col", c}}}});
    }
  }
  return json{{"type", "FeatureCollection"}, {"features", features}}.dump();
}

std::string grid_metadata_json(const InterpolationGrid& grid, const std::vector<NodeDescriptor>& excluded) {
  json stations = json::array();
  for (const auto& s : grid.station_values) {
    json j = node_json(s.node);
    j["value"] = s.value;
    stations.push_back(j);
  }
  json ex = json::array();
  for (const auto& n : excluded) ex.push_back(node_json(n));
  const json meta{{"bbox", bbox_json(grid.bbox)},
                  {"rows", grid.rows},
                  {"cols", grid.cols},
                  {"power", grid.power},
                  {"timestamp", format_iso8601(grid.timestamp)},
                  {"parameter", to_string(grid.parameter)},
                  {"min", grid.min_value()},
                  {"max", grid.max_value()},
                  {"stations", stations},
                  {"excluded", ex}};
  return meta.dump(2) + "\n";
}

std::string grid_to_csv(const InterpolationGrid& grid) {
  std::string out;
  for (int r = 0; r < grid.rows; ++r) {
    for (int c = 0; c < grid.cols; ++c) {
      if (c > 0) out += ',';
      out += format_number(grid.at(r, c));
    }
    out += '\n';
  }
  return out;
}

namespace {

template <typename Cell>
std::string square_csv(const std::vector<std::string>& ids, Cell&& cell) {
  std::string out = "node_id";
  for (const auto& id : ids) out += "," + id;
  out += '\n';
  for (std::size_t i = 0; i < ids.size(); ++i) {
    out += ids[i];
    for (std::size_t j = 0; j < ids.size(); ++j) out += "," + cell(i, j);
    out += '\n';
  }
  return out;
}

}  // namespace

std::string matrix_to_csv(const CorrelationMatrix& m) {
  return square_csv(m.node_ids, [&m](std::size_t i, std::size_t j) {
    return m.tau[i][j] ? format_number(*m.tau[i][j]) : std::string{};
  });
}

std::string pair_counts_to_csv(const CorrelationMatrix& m) {
  return square_csv(m.node_ids, [&m](std::size_t i, std::size_t j) { return std::to_string(m.pair_counts[i][j]); });
}

std::string qq_to_csv(const QQPairs& qq) {
  std::string out = "p,quantile_x,quantile_y\n";
  for (std::size_t i = 0; i < qq.points.size(); ++i) {
    out += format_number(qq.probabilities[i]) + "," + format_number(qq.points[i].first) + "," +
           format_number(qq.points[i].second) + "\n";
  }
  return out;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error("cannot open " + path + " for writing");
  f << content;
  f.flush();
  if (!f) throw Error("failed writing " + path);
}

}  // namespace aqnet::analytics
