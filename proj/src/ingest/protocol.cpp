#include "aqnet/ingest/protocol.hpp"

#include <charconv>

#include "aqnet/core/errors.hpp"
#include "aqnet/core/number.hpp"

namespace aqnet::ingest {

Parameter field_parameter(std::size_t index) noexcept { return kAllParameters[index]; }

UpdateQuery UpdateQuery::from_params(const std::multimap<std::string, std::string>& params) {
  UpdateQuery q;
  if (auto it = params.find("api_key"); it != params.end()) q.api_key = it->second;
  for (std::size_t i = 0; i < kFieldNames.size(); ++i) {
    if (auto it = params.find(std::string(kFieldNames[i])); it != params.end()) q.fields[i] = it->second;
  }
  if (auto it = params.find("created_at"); it != params.end()) q.created_at = it->second;
  return q;
}

std::vector<std::pair<std::string, std::string>> encode_update(const std::string& write_key,
                                                               const SensorSample& sample) {
  std::vector<std::pair<std::string, std::string>> params{{"api_key", write_key}};
  for (std::size_t i = 0; i < kFieldNames.size(); ++i) {
    if (const auto& v = sample.get(field_parameter(i))) params.emplace_back(kFieldNames[i], format_number(*v));
  }
  params.emplace_back("created_at", format_iso8601(sample.timestamp));
  return params;
}

SensorSample decode_fields(const UpdateQuery& query) {
  SensorSample s;
  for (std::size_t i = 0; i < kFieldNames.size(); ++i) {
    if (!query.fields[i]) continue;
    const auto v = parse_number(*query.fields[i]);
    const Parameter p = field_parameter(i);
    if (v && is_valid_value(p, *v)) s.get(p) = *v;
  }
  return s;
}

std::string format_csv_row(const Entry& entry) {
  std::string line = format_iso8601(entry.sample.timestamp);
  line += ',';
  line += std::to_string(entry.entry_id);
  for (const Parameter p : kAllParameters) {
    line += ',';
    if (const auto& v = entry.sample.get(p)) line += format_number(*v);
  }
  return line;
}

namespace {

std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      cells.push_back(line.substr(start));
      break;
    }
    cells.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return cells;
}

}  // namespace

std::vector<Entry> parse_csv(std::string_view document) {
  std::vector<Entry> entries;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < document.size()) {
    std::size_t eol = document.find('\n', pos);
    if (eol == std::string_view::npos) eol = document.size();
    std::string_view line = document.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line_no == 1) {
      if (line != kCsvHeader) throw ValidationError("csv line 1: unexpected header");
      continue;
    }
    if (line.empty()) continue;

    const auto cells = split_commas(line);
    const auto fail = [&](const std::string& what) {
      throw ValidationError("csv line " + std::to_string(line_no) + ": " + what);
    };
    if (cells.size() != 6) fail("expected 6 cells");
    Entry e;
    const auto ts = parse_iso8601(cells[0]);
    if (!ts) fail("bad created_at");
    e.sample.timestamp = *ts;
    const auto [ptr, ec] = std::from_chars(cells[1].data(), cells[1].data() + cells[1].size(), e.entry_id);
    if (ec != std::errc{} || ptr != cells[1].data() + cells[1].size() || e.entry_id <= 0) fail("bad entry_id");
    for (std::size_t i = 0; i < 4; ++i) {
      if (cells[i + 2].empty()) continue;
      const auto v = parse_number(cells[i + 2]);
      if (!v || !is_valid_value(field_parameter(i), *v)) fail("bad field" + std::to_string(i + 1));
      e.sample.get(field_parameter(i)) = *v;
    }
    entries.push_back(e);
  }
  if (line_no == 0) throw ValidationError("csv document is empty (missing header)");
  return entries;
}

}  // namespace aqnet::ingest
