#include <doctest.h>

#include <atomic>
#include <fstream>
#include <set>
#include <thread>

#include "aqnet/core/errors.hpp"
#include "aqnet/ingest/append_log.hpp"
#include "aqnet/ingest/feed_json.hpp"
#include "aqnet/ingest/protocol.hpp"
#include "aqnet/ingest/store.hpp"
#include "test_support.hpp"

using namespace aqnet;
using namespace aqnet::ingest;

namespace {

constexpr Timestamp kT0 = 1'572'195'600;  // 2019-10-27T17:00:00Z

NodeDescriptor node(const std::string& id, double lat = 17.445, double lon = 78.349) {
  NodeDescriptor n;
  n.node_id = id;
  n.display_name = id;
  n.location = GeoPoint(lat, lon);
  return n;
}

UpdateQuery query(const std::string& key, std::multimap<std::string, std::string> extra) {
  extra.emplace("api_key", key);
  return UpdateQuery::from_params(extra);
}

}  // namespace

TEST_CASE("register_first_channel_is_one") {
  ChannelStore store;
  const auto a = store.register_channel(node("Node1"), kT0);
  const auto b = store.register_channel(node("Node2"), kT0);
  CHECK(a.channel_id == 1);
  CHECK(b.channel_id == 2);
  CHECK(a.write_key != b.write_key);
  CHECK(a.write_key.size() == 16);
  CHECK_THROWS_AS(store.register_channel(node("Node1"), kT0), ConflictError);
  CHECK(store.binding_for_node("Node2")->write_key == b.write_key);
  CHECK_FALSE(store.binding_for_node("Node9"));
}

TEST_CASE("update_happy_path_and_auth") {
  ChannelStore store;
  const auto b = store.register_channel(node("Node1"), kT0);
  const auto r = store.handle_update(query(b.write_key, {{"field1", "23.4"}, {"field2", "51.0"}}), kT0);
  CHECK(r.status == UpdateStatus::accepted);
  CHECK(r.entry_id == 1);
  const auto bad = store.handle_update(query("WRONG", {{"field1", "23.4"}}), kT0);
  CHECK(bad.status == UpdateStatus::unauthorized);
  CHECK(bad.entry_id == 0);
  const auto none = store.handle_update(query(b.write_key, {{"field9", "1"}}), kT0);
  CHECK(none.status == UpdateStatus::bad_request);
  CHECK(store.entry_count(1) == 1);
}

TEST_CASE("update_non_numeric_field_is_absent") {
  ChannelStore store;
  const auto b = store.register_channel(node("Node1"), kT0);
  store.handle_update(query(b.write_key, {{"field1", "abc"}, {"field2", "51.0"}}), kT0);
  const auto last = store.latest(1);
  REQUIRE(last);
  CHECK_FALSE(last->sample.pm25);
  CHECK(last->sample.pm10 == 51.0);
  // Out-of-range humidity is dropped the same way.
  store.handle_update(query(b.write_key, {{"field1", "3"}, {"field4", "140"}}), kT0);
  CHECK_FALSE(store.latest(1)->sample.humidity);
  CHECK(store.handle_update(query(b.write_key, {{"field1", "nan"}}), kT0).status == UpdateStatus::bad_request);
}

TEST_CASE("update_created_at_rules") {
  ChannelStore store;
  const auto b = store.register_channel(node("Node1"), kT0);
  store.handle_update(query(b.write_key, {{"field1", "1"}, {"created_at", "2019-10-27T16:00:00Z"}}), kT0);
  CHECK(store.latest(1)->sample.timestamp == kT0 - 3600);
  store.handle_update(query(b.write_key, {{"field1", "1"}, {"created_at", "not a time"}}), kT0 + 5);
  CHECK(store.latest(1)->sample.timestamp == kT0 + 5);
}

TEST_CASE("latest_after_three_and_empty") {
  ChannelStore store;
  const auto b = store.register_channel(node("Node1"), kT0);
  CHECK_FALSE(store.latest(1));
  for (int i = 0; i < 3; ++i) store.handle_update(query(b.write_key, {{"field1", std::to_string(i)}}), kT0 + i);
  CHECK(store.latest(1)->entry_id == 3);
  CHECK_THROWS_AS(store.latest(7), NotFoundError);
}

TEST_CASE("range_rules") {
  ChannelStore store;
  const auto b = store.register_channel(node("Node1"), kT0);
  for (int i = 0; i < 100; ++i) {
    store.handle_update(query(b.write_key, {{"field1", std::to_string(i)}, {"created_at", format_iso8601(kT0 + 15 * i)}}),
                        kT0);
  }
  CHECK(store.range(1, kT0, kT0).empty());
  const auto all = store.range(1, kMinTime, kMaxTime);
  REQUIRE(all.size() == 100);
  for (std::size_t i = 0; i < all.size(); ++i) CHECK(all[i].entry_id == static_cast<std::int64_t>(i) + 1);
  const auto newest = store.range(1, kMinTime, kMaxTime, 10);
  REQUIRE(newest.size() == 10);
  CHECK(newest.front().entry_id == 91);
  CHECK(newest.back().entry_id == 100);
  const auto window = store.range(1, kT0 + 15, kT0 + 45);
  REQUIRE(window.size() == 2);
  CHECK(window[0].entry_id == 2);
  CHECK_THROWS_AS(store.range(1, kT0 + 1, kT0), ValidationError);
  CHECK_THROWS_AS(store.range(2, kT0, kT0 + 1), NotFoundError);
}

TEST_CASE("csv_formatting_and_round_trip") {
  ChannelStore store;
  const auto b = store.register_channel(node("Node1"), kT0);
  CHECK(store.export_csv(1) == std::string(kCsvHeader) + "\n");
  store.handle_update(query(b.write_key, {{"field1", "23.4"}, {"created_at", "2019-10-27T17:00:00Z"}}), kT0);
  store.handle_update(query(b.write_key, {{"field1", "8.1"}, {"field2", "13.2"}, {"field3", "24.5"},
                                          {"field4", "61"}, {"created_at", "2019-10-27T17:00:15Z"}}),
                      kT0);
  const std::string doc = store.export_csv(1);
  CHECK(doc == std::string(kCsvHeader) + "\n2019-10-27T17:00:00Z,1,23.4,,,\n2019-10-27T17:00:15Z,2,8.1,13.2,24.5,61\n");
  const auto entries = parse_csv(doc);
  std::string again(kCsvHeader);
  again += '\n';
  for (const auto& e : entries) again += format_csv_row(e) + "\n";
  CHECK(again == doc);
  CHECK_THROWS_AS(parse_csv("created_at,entry_id,field1,field2,field3,field4\nbogus,1,,,,\n"), ValidationError);
}

TEST_CASE("encode_decode_round_trip") {
  SensorSample s;
  s.timestamp = kT0;
  s.pm25 = 23.4;
  s.humidity = 61.0;
  const auto params = encode_update("KEY", s);
  const auto q = UpdateQuery::from_params({params.begin(), params.end()});
  CHECK(q.api_key == "KEY");
  CHECK(q.created_at == "2019-10-27T17:00:00Z");
  SensorSample d = decode_fields(q);
  d.timestamp = kT0;
  CHECK(d == s);
}

TEST_CASE("feed_json_shapes") {
  Entry e{7, {}};
  e.sample.timestamp = kT0;
  e.sample.pm10 = 51.0;
  const auto j = entry_to_json(e);
  CHECK(j["entry_id"] == 7);
  CHECK(j["created_at"] == "2019-10-27T17:00:00Z");
  CHECK(j["field1"].is_null());
  CHECK(j["field2"] == "51");
  CHECK(entry_from_json(j) == e);
  const auto empty = empty_entry_json();
  for (const char* k : {"created_at", "entry_id", "field1", "field2", "field3", "field4"}) {
    CHECK(empty.contains(k));
    CHECK(empty[k].is_null());
  }
  ChannelInfo info{3, "Node3", "Node 3", GeoPoint(17.4, 78.3), NodeKind::reference, kT0};
  CHECK(channel_from_json(channel_to_json(info, 5)).node_id == "Node3");
  CHECK(channel_from_json(channel_to_json(info, 5)).kind == NodeKind::reference);
}

TEST_CASE("store_persists_and_reloads") {
  testing::TempDir dir;
  std::string key;
  {
    ChannelStore store({dir.path()});
    key = store.register_channel(node("Node1"), kT0).write_key;
    store.register_channel(node("Node2"), kT0);
    for (int i = 0; i < 50; ++i) store.handle_update(query(key, {{"field1", std::to_string(i)}}), kT0 + i);
  }
  ChannelStore store({dir.path()});
  CHECK(store.channels().size() == 2);
  CHECK(store.entry_count(1) == 50);
  CHECK(store.entry_count(2) == 0);
  CHECK(store.latest(1)->sample.pm25 == 49.0);
  // The key still authenticates and numbering continues.
  CHECK(store.handle_update(query(key, {{"field1", "1"}}), kT0 + 100).entry_id == 51);
  CHECK_THROWS_AS(store.register_channel(node("Node1"), kT0), ConflictError);
}

TEST_CASE("store_truncates_partial_trailing_line") {
  testing::TempDir dir;
  std::string key;
  {
    ChannelStore store({dir.path()});
    key = store.register_channel(node("Node1"), kT0).write_key;
    for (int i = 0; i < 3; ++i) store.handle_update(query(key, {{"field1", "1"}}), kT0 + i);
  }
  {
    std::ofstream f(dir.path() / "channel_1.csv", std::ios::app);
    f << "2019-10-27T17:00:09Z,4,1";
  }
  ChannelStore store({dir.path()});
  CHECK(store.entry_count(1) == 3);
  CHECK(store.handle_update(query(key, {{"field1", "2"}}), kT0 + 10).entry_id == 4);
  ChannelStore reread({dir.path(), 1, true});
  CHECK(reread.entry_count(1) == 4);
}

TEST_CASE("read_only_store_never_writes") {
  testing::TempDir dir;
  CHECK_THROWS_AS(ChannelStore({dir.path() / "missing", 1, true}), Error);
  {
    ChannelStore store({dir.path()});
    store.register_channel(node("Node1"), kT0);
  }
  ChannelStore ro({dir.path(), 1, true});
  CHECK_THROWS_AS(ro.register_channel(node("Node2"), kT0), Error);
}

TEST_CASE("store_rejects_unusable_directory") {
  testing::TempDir dir;
  const auto file = dir.path() / "plain-file";
  std::ofstream(file) << "x";
  CHECK_THROWS_AS(ChannelStore({file}), Error);
}

TEST_CASE("concurrent_writers_lose_nothing") {
  ChannelStore store;
  constexpr int kChannels = 4;
  constexpr int kPerWriter = 500;
  std::vector<std::string> keys;
  for (int c = 0; c < kChannels; ++c) keys.push_back(store.register_channel(node("N" + std::to_string(c)), kT0).write_key);

  std::atomic<int> accepted{0};
  std::atomic<bool> done{false};
  std::atomic<bool> reader_ok{true};
  std::thread reader([&] {
    // Entries a reader sees must always be a gap-free prefix.
    while (!done.load()) {
      for (int c = 1; c <= kChannels; ++c) {
        const auto entries = store.range(c, kMinTime, kMaxTime);
        for (std::size_t i = 0; i < entries.size(); ++i) {
          if (entries[i].entry_id != static_cast<std::int64_t>(i) + 1 || !entries[i].sample.pm25) reader_ok = false;
        }
      }
    }
  });
  std::vector<std::thread> writers;
  for (int w = 0; w < 8; ++w) {
    writers.emplace_back([&, w] {
      const std::string& key = keys[static_cast<std::size_t>(w % kChannels)];
      for (int i = 0; i < kPerWriter; ++i) {
        if (store.handle_update(query(key, {{"field1", std::to_string(w)}}), kT0 + i).status == UpdateStatus::accepted) {
          ++accepted;
        }
      }
    });
  }
  for (auto& t : writers) t.join();
  done = true;
  reader.join();
  CHECK(reader_ok.load());
  std::size_t total = 0;
  for (int c = 1; c <= kChannels; ++c) {
    const auto entries = store.range(c, kMinTime, kMaxTime);
    total += entries.size();
    std::set<std::int64_t> ids;
    for (const auto& e : entries) ids.insert(e.entry_id);
    CHECK(ids.size() == entries.size());
    CHECK(*ids.rbegin() == static_cast<std::int64_t>(entries.size()));
  }
  CHECK(total == static_cast<std::size_t>(accepted.load()));
  CHECK(total == 8u * kPerWriter);
}

TEST_CASE("append_log_reads_stable_elements") {
  AppendLog<int, 4, 8> log;
  for (int i = 0; i < 32; ++i) log.push_back(i);
  CHECK(log.size() == 32);
  CHECK(log[31] == 31);
  CHECK_THROWS_AS(log.push_back(32), std::length_error);
}
