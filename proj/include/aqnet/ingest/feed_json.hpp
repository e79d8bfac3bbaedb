#pragma once

#include <json.hpp>

#include "aqnet/ingest/store.hpp"

// JSON shapes of the channel read API.
namespace aqnet::ingest {

/// `{created_at, entry_id, field1..field4}`; absent fields are null, present
/// ones are decimal strings.
nlohmann::json entry_to_json(const Entry& entry);
/// Same keys as entry_to_json, all null.
nlohmann::json empty_entry_json();
Entry entry_from_json(const nlohmann::json& j);

nlohmann::json channel_to_json(const ChannelInfo& info, std::int64_t last_entry_id);
ChannelInfo channel_from_json(const nlohmann::json& j);

}  // namespace aqnet::ingest
