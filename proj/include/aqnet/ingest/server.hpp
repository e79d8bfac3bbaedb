#pragma once

#include <functional>
#include <string>

#include "aqnet/http/http.hpp"
#include "aqnet/ingest/store.hpp"

namespace aqnet::ingest {

struct RouteOptions {
  /// Required for POST /channels. Empty leaves registration open.
  std::string admin_key;
  /// Server clock used when an update carries no usable created_at.
  std::function<Timestamp()> clock;
};

Timestamp system_now();

/// Mounts the channel-feed API on `server`:
///   GET  /update?api_key=K&field1..4&created_at   -> text entry_id, or "0"
///   GET  /channels/{id}/feeds/last.json
///   GET  /channels/{id}/feeds.json?start=&end=&results=
///   GET  /channels/{id}/export.csv?start=&end=
///   GET  /channels.json
///   POST /channels                                 -> {channel_id, write_key}
/// `store` must outlive the server.
void mount_ingest_routes(http::Server& server, ChannelStore& store, RouteOptions options = {});

}  // namespace aqnet::ingest
