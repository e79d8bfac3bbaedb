#pragma once

#include "aqnet/cleaning/cleaning.hpp"
#include "aqnet/http/http.hpp"
#include "aqnet/ingest/store.hpp"

namespace aqnet::cli {

/// Mounts GET /analytics/idw.json?at=&param=&window=&rows=&cols=&bbox=&power=
/// on a server that owns `store`. The body is {metadata, grid}: the grid
/// sidecar record and the cell FeatureCollection. `at` defaults to the newest
/// entry across channels; param pm10, window 5m, 50 x 50 cells. 422 when no
/// station has data at the timestamp.
void mount_grid_routes(http::Server& server, const ingest::ChannelStore& store,
                       cleaning::CleanOptions options = {});

}  // namespace aqnet::cli
