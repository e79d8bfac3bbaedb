#include "aqnet/ingest/feed_json.hpp"

#include "aqnet/core/errors.hpp"
#include "aqnet/core/number.hpp"

namespace aqnet::ingest {

using nlohmann::json;

json entry_to_json(const Entry& entry) {
  json j{{"created_at", format_iso8601(entry.sample.timestamp)}, {"entry_id", entry.entry_id}};
  for (std::size_t i = 0; i < kFieldNames.size(); ++i) {
    const auto& v = entry.sample.get(field_parameter(i));
    j[std::string(kFieldNames[i])] = v ? json(format_number(*v)) : json(nullptr);
  }
  return j;
}

json empty_entry_json() {
  json j{{"created_at", nullptr}, {"entry_id", nullptr}};
  for (const auto name : kFieldNames) j[std::string(name)] = nullptr;
  return j;
}

Entry entry_from_json(const json& j) {
  Entry e;
  e.entry_id = j.at("entry_id").get<std::int64_t>();
  const auto ts = parse_iso8601(j.at("created_at").get<std::string>());
  if (!ts) throw ValidationError("feed entry has malformed created_at");
  e.sample.timestamp = *ts;
  for (std::size_t i = 0; i < kFieldNames.size(); ++i) {
    const auto it = j.find(std::string(kFieldNames[i]));
    if (it == j.end() || it->is_null()) continue;
    std::optional<double> v = it->is_number() ? std::optional<double>(it->get<double>())
                                              : parse_number(it->get<std::string>());
    if (v) e.sample.get(field_parameter(i)) = *v;
  }
  return e;
}

json channel_to_json(const ChannelInfo& info, std::int64_t last_entry_id) {
  json j{{"id", info.channel_id},
         {"node_id", info.node_id},
         {"name", info.display_name},
         {"latitude", info.location.lat()},
         {"longitude", info.location.lon()},
         {"kind", to_string(info.kind)},
         {"created_at", format_iso8601(info.created_at)},
         {"last_entry_id", last_entry_id}};
  for (std::size_t i = 0; i < kFieldNames.size(); ++i) {
    j[std::string(kFieldNames[i])] = to_string(field_parameter(i));
  }
  return j;
}

ChannelInfo channel_from_json(const json& j) {
  ChannelInfo info;
  info.channel_id = j.at("id").get<int>();
  info.node_id = j.at("node_id").get<std::string>();
  info.display_name = j.value("name", info.node_id);
  info.location = GeoPoint(j.at("latitude").get<double>(), j.at("longitude").get<double>());
  info.kind = parse_node_kind(j.value("kind", "developed")).value_or(NodeKind::developed);
  if (const auto it = j.find("created_at"); it != j.end() && it->is_string()) {
    info.created_at = parse_iso8601(it->get<std::string>()).value_or(0);
  }
  return info;
}

}  // namespace aqnet::ingest
