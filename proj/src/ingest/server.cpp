#include "aqnet/ingest/server.hpp"

#include <chrono>
#include <charconv>
#include <json.hpp>

#include "aqnet/core/errors.hpp"
#include "aqnet/ingest/feed_json.hpp"

namespace aqnet::ingest {

using nlohmann::json;

Timestamp system_now() {
  return std::chrono::duration_cast<std::chrono::seconds>(std::chrono::system_clock::now().time_since_epoch())
      .count();
}

namespace {

int channel_id_from(const http::Request& req) {
  int id = 0;
  const std::string& s = req.matches.at(1);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), id);
  if (ec != std::errc{} || ptr != s.data() + s.size()) throw NotFoundError("channel " + s + " not found");
  return id;
}

Timestamp time_param(const http::Request& req, const std::string& name, Timestamp fallback) {
  const auto raw = req.param(name);
  if (!raw || raw->empty()) return fallback;
  const auto t = parse_timestamp(*raw);
  if (!t) throw ValidationError("malformed " + name + " timestamp", {{name, "expected ISO-8601 UTC"}});
  return *t;
}

std::optional<std::size_t> results_param(const http::Request& req) {
  const auto raw = req.param("results");
  if (!raw || raw->empty()) return std::nullopt;
  std::size_t n = 0;
  const auto [ptr, ec] = std::from_chars(raw->data(), raw->data() + raw->size(), n);
  if (ec != std::errc{} || ptr != raw->data() + raw->size()) {
    throw ValidationError("malformed results", {{"results", "expected a non-negative integer"}});
  }
  return n;
}

std::int64_t last_entry_id(const ChannelStore& store, int id) {
  const auto last = store.latest(id);
  return last ? last->entry_id : 0;
}

}  // namespace

void mount_ingest_routes(http::Server& server, ChannelStore& store, RouteOptions options) {
  auto clock = options.clock ? options.clock : system_now;

  server.get("/update", [&store, clock](const http::Request& req) {
    const UpdateResult r = store.handle_update(UpdateQuery::from_params(req.params), clock());
    switch (r.status) {
      case UpdateStatus::accepted: return http::Response::text(200, std::to_string(r.entry_id));
      case UpdateStatus::unauthorized: return http::Response::text(401, "0");
      case UpdateStatus::bad_request: break;
    }
    return http::Response::text(400, "0");
  });

  server.get(R"(/channels/(\d+)/feeds/last\.json)", [&store](const http::Request& req) {
    const auto last = store.latest(channel_id_from(req));
    return http::Response::json(200, (last ? entry_to_json(*last) : empty_entry_json()).dump());
  });

  server.get(R"(/channels/(\d+)/feeds\.json)", [&store](const http::Request& req) {
    const int id = channel_id_from(req);
    const auto entries =
        store.range(id, time_param(req, "start", kMinTime), time_param(req, "end", kMaxTime), results_param(req));
    json feeds = json::array();
    for (const auto& e : entries) feeds.push_back(entry_to_json(e));
    const json body{{"channel", channel_to_json(store.channel(id), last_entry_id(store, id))}, {"feeds", feeds}};
    return http::Response::json(200, body.dump());
  });

  server.get(R"(/channels/(\d+)/export\.csv)", [&store](const http::Request& req) {
    const int id = channel_id_from(req);
    return http::Response{200, "text/csv",
                          store.export_csv(id, time_param(req, "start", kMinTime), time_param(req, "end", kMaxTime))};
  });

  server.get(R"(/channels\.json)", [&store](const http::Request&) {
    json list = json::array();
    for (const auto& info : store.channels()) list.push_back(channel_to_json(info, last_entry_id(store, info.channel_id)));
    return http::Response::json(200, json{{"channels", list}}.dump());
  });

  server.post("/channels", [&store, clock, admin_key = options.admin_key](const http::Request& req) {
    json body = json::parse(req.body, nullptr, false);
    if (body.is_discarded() || !body.is_object()) throw ValidationError("registration body must be a JSON object");

    std::string presented = req.header("X-Admin-Key").value_or(body.value("admin_key", std::string{}));
    if (!admin_key.empty() && presented != admin_key) {
      return http::Response::json(401, json{{"error", "admin key required"}}.dump());
    }

    std::map<std::string, std::string> bad;
    if (!body.contains("node_id") || !body["node_id"].is_string() || body["node_id"].get<std::string>().empty()) {
      bad["node_id"] = "required non-empty string";
    }
    if (!body.contains("latitude") || !body["latitude"].is_number()) bad["latitude"] = "required number";
    if (!body.contains("longitude") || !body["longitude"].is_number()) bad["longitude"] = "required number";
    std::optional<NodeKind> kind = parse_node_kind(body.value("kind", "developed"));
    if (!kind) bad["kind"] = "must be developed or reference";
    if (!bad.empty()) throw ValidationError("invalid channel registration", bad);

    NodeDescriptor node;
    node.node_id = body["node_id"].get<std::string>();
    node.display_name = body.value("display_name", node.node_id);
    node.location = GeoPoint(body["latitude"].get<double>(), body["longitude"].get<double>());
    node.kind = *kind;
    try {
      const ChannelBinding b = store.register_channel(node, clock());
      return http::Response::json(201, json{{"channel_id", b.channel_id}, {"write_key", b.write_key}}.dump());
    } catch (const ConflictError& e) {
      // The caller holds the admin key, so the existing binding can be returned.
      json err{{"error", e.what()}};
      if (const auto existing = store.binding_for_node(node.node_id)) {
        err["channel_id"] = existing->channel_id;
        err["write_key"] = existing->write_key;
      }
      return http::Response::json(409, err.dump());
    }
  });
}

}  // namespace aqnet::ingest
