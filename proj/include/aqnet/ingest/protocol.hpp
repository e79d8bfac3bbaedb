#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "aqnet/core/sample.hpp"

// Channel-feed wire protocol: GET /update query parameters and the CSV log format.
//
// Field map (fixed for every channel):
//   field1 = pm25, field2 = pm10, field3 = temperature, field4 = humidity
namespace aqnet::ingest {

inline constexpr std::array<std::string_view, 4> kFieldNames{"field1", "field2", "field3", "field4"};
inline constexpr std::string_view kCsvHeader = "created_at,entry_id,field1,field2,field3,field4";

/// Parameter carried by fieldN (index 0..3).
Parameter field_parameter(std::size_t index) noexcept;

/// Raw query of one update request, before any validation.
struct UpdateQuery {
  std::string api_key;
  std::array<std::optional<std::string>, 4> fields;
  std::optional<std::string> created_at;

  static UpdateQuery from_params(const std::multimap<std::string, std::string>& params);
};

/// Query parameters a node sends for `sample` (created_at = sample timestamp).
std::vector<std::pair<std::string, std::string>> encode_update(const std::string& write_key,
                                                               const SensorSample& sample);

/// Applies the per-field parse rule: a value that is non-numeric or out of range
/// for its parameter is treated as absent. Timestamp is left at 0.
SensorSample decode_fields(const UpdateQuery& query);

struct Entry {
  std::int64_t entry_id = 0;
  SensorSample sample;  // sample.timestamp is created_at

  friend bool operator==(const Entry&, const Entry&) = default;
};

/// One CSV log/export line (without trailing newline).
std::string format_csv_row(const Entry& entry);

/// Parses a CSV document produced by export; throws ValidationError with the
/// line number on malformed input.
std::vector<Entry> parse_csv(std::string_view document);

}  // namespace aqnet::ingest
