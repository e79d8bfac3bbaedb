#pragma once

#include <json.hpp>

#include "aqnet/http/http.hpp"
#include "aqnet/sim/simulation.hpp"

namespace aqnet::sim {

/// Mounts the operator control surface:
///   POST /sim/events              BurstEvent body -> {event_id}
///   POST /sim/nodes/{id}/online   {online: bool}  -> {node_id, online}
///   GET  /sim/status              clock, per-node counters, events
/// Event bodies take `center: {lat, lon}` (or top-level lat/lon), the
/// amplitudes (or `amplitude` for both), and optional sigma, onset, ramp,
/// half_life. A missing onset means "now" on the simulated clock.
void mount_control_routes(http::Server& server, Simulation& simulation);

nlohmann::json status_to_json(const SimStatus& status);

}  // namespace aqnet::sim
