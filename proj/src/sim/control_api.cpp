#include "aqnet/sim/control_api.hpp"

#include "aqnet/core/errors.hpp"

namespace aqnet::sim {

using nlohmann::json;

namespace {

json event_to_json(const BurstEvent& e, Timestamp clock, bool pending) {
  return {{"event_id", e.id},
          {"center", {{"lat", e.center.lat()}, {"lon", e.center.lon()}}},
          {"amplitude_pm25", e.amplitude_pm25},
          {"amplitude_pm10", e.amplitude_pm10},
          {"sigma", e.sigma},
          {"onset", format_iso8601(e.onset)},
          {"ramp", e.ramp},
          {"half_life", e.half_life},
          {"pending", pending},
          {"active", !pending && e.onset <= clock},
          {"factor", pending ? 0.0 : temporal_factor(e, clock)}};
}

}  // namespace

json status_to_json(const SimStatus& s) {
  json nodes = json::array();
  for (const auto& n : s.nodes) {
    nodes.push_back({{"node_id", n.node_id},
                     {"channel_id", n.channel_id},
                     {"online", n.online},
                     {"attempted", n.attempted},
                     {"sent", n.sent},
                     {"failed", n.failed}});
  }
  json events = json::array();
  for (const auto& e : s.events) events.push_back(event_to_json(e, s.clock, false));
  for (const auto& e : s.pending_events) events.push_back(event_to_json(e, s.clock, true));
  return {{"clock", format_iso8601(s.clock)},
          {"clock_epoch", s.clock},
          {"running", s.running},
          {"finished", s.finished},
          {"nodes", nodes},
          {"events", events}};
}

void mount_control_routes(http::Server& server, Simulation& sim) {
  server.post("/sim/events", [&sim](const http::Request& req) {
    const BurstEvent e = parse_burst_event(req.body, sim.status().clock);
    const std::int64_t id = sim.inject_event(e);
    return http::Response::json(201, json{{"event_id", id}}.dump());
  });

  server.post(R"(/sim/nodes/([^/]+)/online)", [&sim](const http::Request& req) {
    const json body = json::parse(req.body, nullptr, false);
    if (body.is_discarded() || !body.is_object() || !body.contains("online") || !body["online"].is_boolean()) {
      throw ValidationError("body must be {\"online\": true|false}", {{"online", "required boolean"}});
    }
    const std::string& node_id = req.matches.at(1);
    const bool online = body["online"].get<bool>();
    sim.set_node_online(node_id, online);
    return http::Response::json(200, json{{"node_id", node_id}, {"online", online}}.dump());
  });

  server.get("/sim/status", [&sim](const http::Request&) {
    return http::Response::json(200, status_to_json(sim.status()).dump());
  });
}

}  // namespace aqnet::sim
