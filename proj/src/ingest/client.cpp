#include "aqnet/ingest/client.hpp"

#include <charconv>
#include <json.hpp>

#include "aqnet/core/errors.hpp"
#include "aqnet/ingest/feed_json.hpp"
#include "aqnet/ingest/server.hpp"

namespace aqnet::ingest {

using nlohmann::json;

namespace {

std::multimap<std::string, std::string> to_multimap(const std::vector<std::pair<std::string, std::string>>& v) {
  return {v.begin(), v.end()};
}

}  // namespace

LocalIngestClient::LocalIngestClient(ChannelStore& store) : store_(store) {}

ChannelBinding LocalIngestClient::ensure_channel(const NodeDescriptor& node) {
  if (auto existing = store_.binding_for_node(node.node_id)) return *existing;
  return store_.register_channel(node, system_now());
}

UploadResult LocalIngestClient::upload(const ChannelBinding& binding, const SensorSample& sample) {
  const auto query = UpdateQuery::from_params(to_multimap(encode_update(binding.write_key, sample)));
  try {
    const UpdateResult r = store_.handle_update(query, system_now());
    if (r.status == UpdateStatus::accepted) return {true, r.entry_id, {}};
    return {false, 0, r.status == UpdateStatus::unauthorized ? "unauthorized" : "bad request"};
  } catch (const std::exception& e) {
    return {false, 0, e.what()};
  }
}

HttpIngestClient::HttpIngestClient(const std::string& server_url, std::string admin_key, double timeout_seconds)
    : client_(server_url, timeout_seconds), admin_key_(std::move(admin_key)) {}

ChannelBinding HttpIngestClient::ensure_channel(const NodeDescriptor& node) {
  const json body{{"node_id", node.node_id},
                  {"display_name", node.display_name},
                  {"latitude", node.location.lat()},
                  {"longitude", node.location.lon()},
                  {"kind", to_string(node.kind)}};
  http::Params headers;
  if (!admin_key_.empty()) headers.emplace_back("X-Admin-Key", admin_key_);
  const auto res = client_.post("/channels", body.dump(), "application/json", headers);
  if (!res.transport_ok) throw Error("channel registration for " + node.node_id + " failed: " + res.error);
  const json reply = json::parse(res.body, nullptr, false);
  if ((res.status == 201 || res.status == 200 || res.status == 409) && reply.is_object() &&
      reply.contains("channel_id") && reply.contains("write_key")) {
    return {reply["channel_id"].get<int>(), reply["write_key"].get<std::string>()};
  }
  throw Error("channel registration for " + node.node_id + " rejected with HTTP " + std::to_string(res.status) +
              ": " + res.body);
}

UploadResult HttpIngestClient::upload(const ChannelBinding& binding, const SensorSample& sample) {
  const auto res = client_.get("/update", encode_update(binding.write_key, sample));
  if (!res.transport_ok) return {false, 0, res.error};
  std::int64_t id = 0;
  const auto [ptr, ec] = std::from_chars(res.body.data(), res.body.data() + res.body.size(), id);
  if (res.status != 200 || ec != std::errc{} || id <= 0) {
    return {false, 0, "HTTP " + std::to_string(res.status) + " body " + res.body};
  }
  return {true, id, {}};
}

std::vector<ChannelInfo> fetch_channels(http::Client& client) {
  const auto res = client.get("/channels.json");
  if (!res.ok()) throw Error("GET /channels.json failed: " + (res.transport_ok ? res.body : res.error));
  std::vector<ChannelInfo> out;
  const json doc = json::parse(res.body);
  for (const auto& c : doc.at("channels")) out.push_back(channel_from_json(c));
  return out;
}

std::vector<Entry> fetch_feed(http::Client& client, int channel_id, Timestamp t0, Timestamp t1) {
  http::Params params;
  if (t0 != kMinTime) params.emplace_back("start", format_iso8601(t0));
  if (t1 != kMaxTime) params.emplace_back("end", format_iso8601(t1));
  const std::string path = "/channels/" + std::to_string(channel_id) + "/feeds.json";
  const auto res = client.get(path, params);
  if (!res.ok()) throw Error("GET " + path + " failed: " + (res.transport_ok ? res.body : res.error));
  std::vector<Entry> out;
  const json doc = json::parse(res.body);
  for (const auto& f : doc.at("feeds")) out.push_back(entry_from_json(f));
  return out;
}

}  // namespace aqnet::ingest
