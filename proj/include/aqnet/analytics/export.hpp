#pragma once

#include <string>
#include <vector>

#include "aqnet/analytics/correlation.hpp"
#include "aqnet/analytics/idw.hpp"
#include "aqnet/analytics/qq.hpp"

namespace aqnet::analytics {

/// GeoJSON FeatureCollection of cell-center points, each with properties
/// {parameter, value, timestamp, row, col}.
std::string grid_to_geojson(const InterpolationGrid& grid);
/// {bbox, rows, cols, power, timestamp, parameter, stations, excluded}.
std::string grid_metadata_json(const InterpolationGrid& grid, const std::vector<NodeDescriptor>& excluded = {});
/// rows lines of cols comma-separated values, row 0 first.
std::string grid_to_csv(const InterpolationGrid& grid);

/// node_id header row and column; blank for absent entries.
std::string matrix_to_csv(const CorrelationMatrix& m);
std::string pair_counts_to_csv(const CorrelationMatrix& m);

/// Columns p, quantile_x, quantile_y.
std::string qq_to_csv(const QQPairs& qq);

/// Writes `content` to `path`, throwing Error on failure.
void write_file(const std::string& path, const std::string& content);

}  // namespace aqnet::analytics
