#include <doctest.h>

#include <json.hpp>
#include <thread>

#include "aqnet/cli/grid_api.hpp"
#include "aqnet/core/errors.hpp"
#include "aqnet/http/http.hpp"
#include "aqnet/ingest/client.hpp"
#include "aqnet/ingest/server.hpp"
#include "aqnet/ingest/store.hpp"
#include "aqnet/sim/control_api.hpp"
#include "aqnet/sim/simulation.hpp"
#include "test_support.hpp"

using namespace aqnet;
using nlohmann::json;

namespace {

constexpr Timestamp kT0 = 1'572'195'600;  // 2019-10-27T17:00:00Z
constexpr char kAdmin[] = "s3cret";

/// A store plus ingest server on an ephemeral port.
struct Service {
  explicit Service(ingest::StoreOptions opts = {}, std::string admin = kAdmin) : store(std::move(opts)) {
    ingest::RouteOptions ro;
    ro.admin_key = std::move(admin);
    ro.clock = [] { return kT0; };
    ingest::mount_ingest_routes(server, store, ro);
    cli::mount_grid_routes(server, store);
    port = server.bind("127.0.0.1", 0);
    server.start();
  }
  ~Service() { server.stop(); }

  std::string url() const { return "http://127.0.0.1:" + std::to_string(port); }

  ingest::ChannelStore store;
  http::Server server;
  int port = 0;
};

std::string registration(const std::string& id, double lat = 17.445, double lon = 78.349) {
  return json{{"node_id", id}, {"latitude", lat}, {"longitude", lon}}.dump();
}

http::Params admin_header() { return {{"X-Admin-Key", kAdmin}}; }

sim::ScenarioConfig scenario(int nodes, Timestamp duration, double speedup = 1e9) {
  sim::ScenarioConfig c;
  for (int i = 0; i < nodes; ++i) {
    sim::NodeConfig n;
    n.descriptor.node_id = "Node" + std::to_string(i + 1);
    n.descriptor.display_name = n.descriptor.node_id;
    n.descriptor.location = GeoPoint(17.443 + 0.001 * i, 78.347 + 0.0007 * i);
    c.nodes.push_back(n);
  }
  c.start = kT0;
  c.end = kT0 + duration;
  c.speedup = speedup;
  c.rng_seed = 77;
  return c;
}

}  // namespace

TEST_CASE("registration_rules") {
  Service svc;
  http::Client c(svc.url());
  CHECK(c.post("/channels", registration("Node1")).status == 401);
  CHECK(c.post("/channels", registration("Node1"), "application/json", {{"X-Admin-Key", "wrong"}}).status == 401);
  const auto ok = c.post("/channels", registration("Node1"), "application/json", admin_header());
  REQUIRE(ok.status == 201);
  const auto b = json::parse(ok.body);
  CHECK(b["channel_id"] == 1);
  const auto dup = c.post("/channels", registration("Node1"), "application/json", admin_header());
  CHECK(dup.status == 409);
  CHECK(json::parse(dup.body)["write_key"] == b["write_key"]);
  const auto bad = c.post("/channels", R"({"node_id": "", "latitude": "x"})", "application/json", admin_header());
  CHECK(bad.status == 400);
  CHECK(bad.body.find("latitude") != std::string::npos);
  CHECK(c.post("/channels", registration("N", 95.0), "application/json", admin_header()).status == 400);
  CHECK(c.post("/channels", "not json", "application/json", admin_header()).status == 400);
}

TEST_CASE("update_and_read_routes") {
  Service svc;
  const auto b = svc.store.register_channel(
      [] {
        NodeDescriptor n;
        n.node_id = "Node1";
        n.display_name = "Node1";
        n.location = GeoPoint(17.445, 78.349);
        return n;
      }(),
      kT0);
  http::Client c(svc.url());

  const auto empty = c.get("/channels/1/feeds/last.json");
  REQUIRE(empty.status == 200);
  CHECK(json::parse(empty.body)["entry_id"].is_null());
  CHECK(c.get("/channels/1/export.csv").body == "created_at,entry_id,field1,field2,field3,field4\n");

  const auto first = c.get("/update", {{"api_key", b.write_key}, {"field1", "23.4"}, {"field2", "51.0"}});
  CHECK(first.status == 200);
  CHECK(first.body == "1");
  const auto wrong = c.get("/update", {{"api_key", "WRONG"}, {"field1", "23.4"}});
  CHECK(wrong.status == 401);
  CHECK(wrong.body == "0");
  CHECK(c.get("/update", {{"api_key", b.write_key}}).body == "0");
  // Server clock supplies created_at when absent.
  CHECK(json::parse(c.get("/channels/1/feeds/last.json").body)["created_at"] == "2019-10-27T17:00:00Z");

  for (int i = 2; i <= 100; ++i) {
    const auto r = c.get("/update", {{"api_key", b.write_key},
                                     {"field1", std::to_string(i)},
                                     {"created_at", format_iso8601(kT0 + 15 * (i - 1))}});
    REQUIRE(r.body == std::to_string(i));
  }
  const auto last = json::parse(c.get("/channels/1/feeds/last.json").body);
  CHECK(last["entry_id"] == 100);
  CHECK(last["field1"] == "100");

  const auto feed = json::parse(c.get("/channels/1/feeds.json", {{"results", "10"}}).body);
  REQUIRE(feed["feeds"].size() == 10);
  CHECK(feed["feeds"][0]["entry_id"] == 91);
  CHECK(feed["feeds"][9]["entry_id"] == 100);
  CHECK(feed["channel"]["last_entry_id"] == 100);
  const auto window = json::parse(
      c.get("/channels/1/feeds.json", {{"start", "2019-10-27T17:00:15Z"}, {"end", "2019-10-27T17:00:45Z"}}).body);
  CHECK(window["feeds"].size() == 2);
  const auto none = json::parse(
      c.get("/channels/1/feeds.json", {{"start", "2019-10-27T17:00:00Z"}, {"end", "2019-10-27T17:00:00Z"}}).body);
  CHECK(none["feeds"].empty());
  CHECK(c.get("/channels/1/feeds.json", {{"start", "tuesday"}}).status == 400);
  CHECK(c.get("/channels/1/feeds.json", {{"results", "-3"}}).status == 400);
  CHECK(c.get("/channels/9/feeds.json").status == 404);
  CHECK(c.get("/channels/9/feeds/last.json").status == 404);

  CHECK(c.get("/channels/1/export.csv").body == svc.store.export_csv(1));
  const auto channels = json::parse(c.get("/channels.json").body);
  CHECK(channels["channels"].size() == 1);
  CHECK(channels["channels"][0]["node_id"] == "Node1");
  CHECK(c.get("/nowhere").status == 404);
}

TEST_CASE("simulation_over_http_matches_store") {
  Service svc;
  ingest::HttpIngestClient client(svc.url(), kAdmin);
  sim::Simulation sim(scenario(3, 1800));
  const auto report = sim.run(client);
  CHECK(report.total_failed() == 0);
  CHECK(report.total_sent() == 3 * 120);
  for (const auto& n : report.nodes) CHECK(svc.store.entry_count(n.channel_id) == static_cast<std::size_t>(n.sent));

  // A second simulator recovers the existing bindings.
  sim::Simulation again(scenario(3, 150));
  const auto r2 = again.run(client);
  CHECK(r2.total_failed() == 0);
  CHECK(svc.store.channels().size() == 3);
  CHECK(svc.store.entry_count(1) == 130);

  http::Client reader(svc.url());
  const auto feeds = ingest::fetch_feed(reader, 2);
  CHECK(feeds.size() == 130);
  const auto chans = ingest::fetch_channels(reader);
  CHECK(chans.size() == 3);
  CHECK(chans[2].node_id == "Node3");
}

TEST_CASE("concurrent_http_writers") {
  Service svc;
  std::vector<std::thread> writers;
  std::atomic<int> acknowledged{0};
  for (int w = 0; w < 4; ++w) {
    writers.emplace_back([&, w] {
      ingest::HttpIngestClient client(svc.url(), kAdmin);
      auto node = scenario(4, 1).nodes[static_cast<std::size_t>(w % 2)].descriptor;
      const auto b = client.ensure_channel(node);
      for (int i = 0; i < 150; ++i) {
        SensorSample s;
        s.timestamp = kT0 + i;
        s.pm25 = w;
        if (client.upload(b, s).ok) ++acknowledged;
      }
    });
  }
  for (auto& t : writers) t.join();
  CHECK(acknowledged == 600);
  CHECK(svc.store.channels().size() == 2);
  for (int ch = 1; ch <= 2; ++ch) {
    const auto entries = svc.store.range(ch, ingest::kMinTime, ingest::kMaxTime);
    REQUIRE(entries.size() == 300);
    for (std::size_t i = 0; i < entries.size(); ++i) CHECK(entries[i].entry_id == static_cast<std::int64_t>(i + 1));
  }
}

TEST_CASE("restart_keeps_every_acknowledged_sample") {
  testing::TempDir dir;
  std::int64_t acknowledged = 0;
  std::string key;
  {
    Service svc({dir.path()});
    ingest::HttpIngestClient client(svc.url(), kAdmin);
    auto node = scenario(1, 1).nodes[0].descriptor;
    const auto b = client.ensure_channel(node);
    key = b.write_key;
    for (int i = 0; i < 200; ++i) {
      SensorSample s;
      s.timestamp = kT0 + 15 * i;
      s.pm10 = i;
      acknowledged += client.upload(b, s).ok;
    }
  }
  Service svc({dir.path()});
  CHECK(svc.store.entry_count(1) == static_cast<std::size_t>(acknowledged));
  http::Client c(svc.url());
  CHECK(c.get("/update", {{"api_key", key}, {"field2", "1"}}).body == "201");
  CHECK(json::parse(c.get("/channels/1/feeds/last.json").body)["entry_id"] == 201);
}

TEST_CASE("second_server_on_same_port_fails") {
  Service svc;
  http::Server other;
  CHECK_THROWS_AS(other.bind("127.0.0.1", svc.port), Error);
}

TEST_CASE("sim_control_routes") {
  sim::Simulation sim(scenario(2, 600));
  http::Server server;
  sim::mount_control_routes(server, sim);
  const int port = server.bind("127.0.0.1", 0);
  server.start();
  http::Client c("http://127.0.0.1:" + std::to_string(port));

  const auto ev = c.post("/sim/events",
                         R"({"center": {"lat": 17.443, "lon": 78.347}, "amplitude": 300, "sigma": 60, "ramp": 600})");
  REQUIRE(ev.status == 201);
  CHECK(json::parse(ev.body)["event_id"] == 1);
  auto status = json::parse(c.get("/sim/status").body);
  REQUIRE(status["events"].size() == 1);
  CHECK(status["events"][0]["pending"] == true);
  const auto bad = c.post("/sim/events", R"({"center": {"lat": 17.4, "lon": 78.3}, "amplitude": -5, "half_life": 0})");
  CHECK(bad.status == 400);
  CHECK(bad.body.find("amplitude") != std::string::npos);
  CHECK(bad.body.find("half_life") != std::string::npos);
  CHECK(c.post("/sim/events", R"({"amplitude": 5})").status == 400);

  CHECK(c.post("/sim/nodes/Node2/online", R"({"online": false})").status == 200);
  CHECK(c.post("/sim/nodes/Node9/online", R"({"online": false})").status == 404);
  CHECK(c.post("/sim/nodes/Node1/online", R"({"online": "no"})").status == 400);

  ingest::ChannelStore store;
  ingest::LocalIngestClient client(store);
  const auto report = sim.run(client);
  CHECK(report.nodes[0].sent == 40);
  CHECK(report.nodes[1].sent == 0);
  status = json::parse(c.get("/sim/status").body);
  CHECK(status["finished"] == true);
  CHECK(status["clock"] == "2019-10-27T17:09:45Z");
  CHECK(status["nodes"][1]["online"] == false);
  CHECK(status["events"][0]["pending"] == false);
  // A missing onset means the simulated clock at injection.
  REQUIRE(sim.field().events.size() == 1);
  CHECK(sim.field().events[0].onset == kT0);
  server.stop();
}

TEST_CASE("grid_endpoint") {
  Service svc;
  {
    http::Client c(svc.url());
    CHECK(c.get("/analytics/idw.json").status == 422);
  }
  auto cfg = scenario(4, 3600);
  cfg.nodes[3].descriptor.online = false;
  ingest::LocalIngestClient client(svc.store);
  sim::Simulation(cfg).run(client);

  http::Client c(svc.url());
  const auto r = c.get("/analytics/idw.json", {{"at", "2019-10-27T17:30:00Z"}, {"rows", "8"}, {"cols", "6"}});
  REQUIRE(r.status == 200);
  const auto body = json::parse(r.body);
  CHECK(body["metadata"]["rows"] == 8);
  CHECK(body["metadata"]["cols"] == 6);
  CHECK(body["metadata"]["timestamp"] == "2019-10-27T17:30:00Z");
  CHECK(body["metadata"]["stations"].size() == 3);
  CHECK(body["metadata"]["excluded"][0]["node_id"] == "Node4");
  CHECK(body["grid"]["features"].size() == 48);

  const auto latest = json::parse(c.get("/analytics/idw.json", {{"param", "pm25"}}).body);
  CHECK(latest["metadata"]["timestamp"] == "2019-10-27T17:55:00Z");
  CHECK(latest["metadata"]["parameter"] == "pm25");

  CHECK(c.get("/analytics/idw.json", {{"at", "2019-11-05T00:00:00Z"}}).status == 422);
  CHECK(c.get("/analytics/idw.json", {{"at", "soon"}}).status == 400);
  CHECK(c.get("/analytics/idw.json", {{"param", "humidity"}}).status == 400);
  CHECK(c.get("/analytics/idw.json", {{"rows", "1"}}).status == 400);
  CHECK(c.get("/analytics/idw.json", {{"bbox", "1,2"}}).status == 400);
}
