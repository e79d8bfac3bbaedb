#include "aqnet/sim/scenario.hpp"

#include <fstream>
#include <json.hpp>
#include <set>
#include <sstream>

#include "aqnet/core/errors.hpp"

namespace aqnet::sim {

using nlohmann::json;

int ScenarioConfig::find_node(std::string_view node_id) const noexcept {
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (nodes[i].descriptor.node_id == node_id) return static_cast<int>(i);
  }
  return -1;
}

void validate(const ScenarioConfig& c) {
  std::map<std::string, std::string> bad;
  if (c.nodes.empty()) bad["nodes"] = "at least one node is required";
  if (!(c.start < c.end)) bad["end"] = "must be after start";
  if (c.sample_interval <= 0) bad["sample_interval"] = "must be > 0";
  if (!(c.speedup >= 1.0)) bad["speedup"] = "must be >= 1";
  std::set<std::string> ids;
  std::set<int> channels;
  for (std::size_t i = 0; i < c.nodes.size(); ++i) {
    const auto& d = c.nodes[i].descriptor;
    const std::string prefix = "nodes[" + std::to_string(i) + "].";
    if (d.node_id.empty()) bad[prefix + "node_id"] = "must not be empty";
    if (!ids.insert(d.node_id).second) bad[prefix + "node_id"] = "duplicate node_id " + d.node_id;
    if (d.channel_id != 0 && !channels.insert(d.channel_id).second) {
      bad[prefix + "channel_id"] = "duplicate channel_id " + std::to_string(d.channel_id);
    }
    try {
      validate(c.nodes[i].noise);
    } catch (const ValidationError& e) {
      for (const auto& [k, v] : e.fields()) bad[prefix + "noise." + k] = v;
    }
  }
  try {
    validate(c.field);
  } catch (const ValidationError& e) {
    for (const auto& [k, v] : e.fields()) bad["field." + k] = v;
  }
  try {
    validate(c.ambient);
  } catch (const ValidationError& e) {
    for (const auto& [k, v] : e.fields()) bad["ambient." + k] = v;
  }
  if (!bad.empty()) {
    std::string msg = "scenario: invalid value for `" + bad.begin()->first + "`: " + bad.begin()->second;
    throw ValidationError(msg, std::move(bad));
  }
}

namespace {

[[noreturn]] void fail(const std::string& key, const std::string& what) {
  throw ValidationError("scenario: " + what, {{key, what}});
}

// Strict view over one JSON object: tracks consumed keys so leftovers can be
// reported as unknown.
class Reader {
 public:
  Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) fail(path_, "`" + path_ + "` must be an object");
  }

  std::string key(const std::string& k) const { return path_.empty() ? k : path_ + "." + k; }

  bool has(const std::string& k) const { return j_.contains(k); }

  const json& require(const std::string& k) {
    if (!j_.contains(k)) fail(key(k), "missing required key `" + key(k) + "`");
    seen_.insert(k);
    return j_.at(k);
  }

  double number(const std::string& k, std::optional<double> fallback = std::nullopt) {
    if (!has(k)) {
      if (fallback) return *fallback;
      require(k);
    }
    const json& v = require(k);
    if (!v.is_number()) fail(key(k), "`" + key(k) + "` must be a number");
    return v.get<double>();
  }

  std::int64_t integer(const std::string& k, std::optional<std::int64_t> fallback = std::nullopt) {
    if (!has(k) && fallback) return *fallback;
    const json& v = require(k);
    if (!v.is_number_integer()) fail(key(k), "`" + key(k) + "` must be an integer");
    return v.get<std::int64_t>();
  }

  std::string string(const std::string& k, std::optional<std::string> fallback = std::nullopt) {
    if (!has(k) && fallback) return *fallback;
    const json& v = require(k);
    if (!v.is_string()) fail(key(k), "`" + key(k) + "` must be a string");
    return v.get<std::string>();
  }

  bool boolean(const std::string& k, bool fallback) {
    if (!has(k)) return fallback;
    const json& v = require(k);
    if (!v.is_boolean()) fail(key(k), "`" + key(k) + "` must be true or false");
    return v.get<bool>();
  }

  Timestamp timestamp(const std::string& k, std::optional<Timestamp> fallback = std::nullopt) {
    if (!has(k) && fallback) return *fallback;
    const json& v = require(k);
    if (v.is_number_integer()) return v.get<Timestamp>();
    if (v.is_string()) {
      if (const auto t = parse_timestamp(v.get<std::string>())) return *t;
    }
    fail(key(k), "`" + key(k) + "` must be an ISO-8601 timestamp or epoch seconds");
  }

  GeoPoint point(const std::string& k) {
    Reader r(require(k), key(k));
    const double lat = r.number("lat");
    const double lon = r.number("lon");
    r.finish();
    try {
      return GeoPoint(lat, lon);
    } catch (const ValidationError& e) {
      fail(key(k), "`" + key(k) + "` " + e.what());
    }
  }

  void finish() const {
    for (const auto& [k, _] : j_.items()) {
      if (!seen_.contains(k)) fail(key(k), "unknown key `" + key(k) + "`");
    }
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

BurstEvent read_event(Reader& r, Timestamp default_onset) {
  BurstEvent e;
  if (r.has("center")) {
    e.center = r.point("center");
  } else {
    const double lat = r.number("lat");
    const double lon = r.number("lon");
    try {
      e.center = GeoPoint(lat, lon);
    } catch (const ValidationError& err) {
      fail(r.key("center"), err.what());
    }
  }
  const double amplitude = r.number("amplitude", 0.0);
  e.amplitude_pm25 = r.number("amplitude_pm25", amplitude);
  e.amplitude_pm10 = r.number("amplitude_pm10", amplitude);
  e.sigma = r.number("sigma", BurstEvent{}.sigma);
  e.onset = r.timestamp("onset", default_onset);
  e.ramp = r.number("ramp", 0.0);
  e.half_life = r.number("half_life", BurstEvent{}.half_life);
  r.finish();
  return e;
}

NoiseModel read_noise(Reader& r) {
  NoiseModel n;
  n.relative_error = r.number("relative_error", n.relative_error);
  n.absolute_error = r.number("absolute_error", n.absolute_error);
  n.resolution = r.number("resolution", n.resolution);
  n.temp_error = r.number("temp_error", n.temp_error);
  n.humidity_error = r.number("humidity_error", n.humidity_error);
  r.finish();
  return n;
}

json point_json(const GeoPoint& p) { return {{"lat", p.lat()}, {"lon", p.lon()}}; }

json event_json(const BurstEvent& e) {
  return {{"center", point_json(e.center)}, {"amplitude_pm25", e.amplitude_pm25},
          {"amplitude_pm10", e.amplitude_pm10}, {"sigma", e.sigma},
          {"onset", format_iso8601(e.onset)},   {"ramp", e.ramp},
          {"half_life", e.half_life}};
}

}  // namespace

ScenarioConfig parse_scenario(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("scenario: not valid JSON: ") + e.what());
  }
  Reader root(doc, "");
  ScenarioConfig c;

  c.start = root.timestamp("start");
  c.end = root.timestamp("end");
  c.sample_interval = root.integer("sample_interval", c.sample_interval);
  c.speedup = root.number("speedup", c.speedup);
  c.rng_seed = static_cast<std::uint64_t>(root.integer("rng_seed", 0));
  c.server_url = root.string("server_url", c.server_url);

  const json& nodes = root.require("nodes");
  if (!nodes.is_array()) fail("nodes", "`nodes` must be a list");
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    Reader r(nodes[i], "nodes[" + std::to_string(i) + "]");
    NodeConfig nc;
    nc.descriptor.node_id = r.string("node_id");
    nc.descriptor.display_name = r.string("display_name", nc.descriptor.node_id);
    nc.descriptor.location = r.point("location");
    nc.descriptor.channel_id = static_cast<int>(r.integer("channel_id", 0));
    const std::string kind = r.string("kind", "developed");
    const auto k = parse_node_kind(kind);
    if (!k) fail(r.key("kind"), "`" + r.key("kind") + "` must be developed or reference");
    nc.descriptor.kind = *k;
    nc.descriptor.online = r.boolean("online", true);
    if (r.has("noise")) {
      Reader nr(r.require("noise"), r.key("noise"));
      nc.noise = read_noise(nr);
    }
    r.finish();
    c.nodes.push_back(std::move(nc));
  }

  if (root.has("field")) {
    Reader fr(root.require("field"), "field");
    c.field.baseline_pm25 = fr.number("baseline_pm25", c.field.baseline_pm25);
    c.field.baseline_pm10 = fr.number("baseline_pm10", c.field.baseline_pm10);
    c.field.diurnal_amplitude_pm25 = fr.number("diurnal_amplitude_pm25", 0.0);
    c.field.diurnal_amplitude_pm10 = fr.number("diurnal_amplitude_pm10", 0.0);
    c.field.diurnal_phase = fr.number("diurnal_phase", 0.0);
    if (fr.has("events")) {
      const json& events = fr.require("events");
      if (!events.is_array()) fail("field.events", "`field.events` must be a list");
      for (std::size_t i = 0; i < events.size(); ++i) {
        Reader er(events[i], "field.events[" + std::to_string(i) + "]");
        c.field.events.push_back(read_event(er, c.start));
      }
    }
    fr.finish();
  }

  if (root.has("ambient")) {
    Reader ar(root.require("ambient"), "ambient");
    AmbientProfile& a = c.ambient;
    a.temperature_min = ar.number("temperature_min", a.temperature_min);
    a.temperature_max = ar.number("temperature_max", a.temperature_max);
    a.humidity_min = ar.number("humidity_min", a.humidity_min);
    a.humidity_max = ar.number("humidity_max", a.humidity_max);
    a.peak_offset = ar.number("peak_offset", a.peak_offset);
    ar.finish();
  }
  root.finish();

  validate(c);
  return c;
}

ScenarioConfig load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read scenario file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str());
}

std::string dump_scenario(const ScenarioConfig& c) {
  json nodes = json::array();
  for (const auto& n : c.nodes) {
    const auto& d = n.descriptor;
    nodes.push_back({{"node_id", d.node_id},
                     {"display_name", d.display_name},
                     {"location", point_json(d.location)},
                     {"channel_id", d.channel_id},
                     {"kind", to_string(d.kind)},
                     {"online", d.online},
                     {"noise",
                      {{"relative_error", n.noise.relative_error},
                       {"absolute_error", n.noise.absolute_error},
                       {"resolution", n.noise.resolution},
                       {"temp_error", n.noise.temp_error},
                       {"humidity_error", n.noise.humidity_error}}}});
  }
  json events = json::array();
  for (const auto& e : c.field.events) events.push_back(event_json(e));
  const json doc{{"nodes", nodes},
                 {"field",
                  {{"baseline_pm25", c.field.baseline_pm25},
                   {"baseline_pm10", c.field.baseline_pm10},
                   {"diurnal_amplitude_pm25", c.field.diurnal_amplitude_pm25},
                   {"diurnal_amplitude_pm10", c.field.diurnal_amplitude_pm10},
                   {"diurnal_phase", c.field.diurnal_phase},
                   {"events", events}}},
                 {"ambient",
                  {{"temperature_min", c.ambient.temperature_min},
                   {"temperature_max", c.ambient.temperature_max},
                   {"humidity_min", c.ambient.humidity_min},
                   {"humidity_max", c.ambient.humidity_max},
                   {"peak_offset", c.ambient.peak_offset}}},
                 {"start", format_iso8601(c.start)},
                 {"end", format_iso8601(c.end)},
                 {"sample_interval", c.sample_interval},
                 {"speedup", c.speedup},
                 {"rng_seed", c.rng_seed},
                 {"server_url", c.server_url}};
  return doc.dump(2);
}

BurstEvent parse_burst_event(std::string_view json_text, Timestamp default_onset) {
  const json doc = json::parse(json_text, nullptr, false);
  if (doc.is_discarded()) throw ValidationError("event body is not valid JSON");
  try {
    Reader r(doc, "");
    BurstEvent e = read_event(r, default_onset);
    validate(e);
    return e;
  } catch (const ValidationError& e) {
    // Drop the "scenario:" prefix for API callers.
    std::string msg = e.what();
    if (msg.rfind("scenario: ", 0) == 0) msg = msg.substr(10);
    throw ValidationError(msg, e.fields());
  }
}

}  // namespace aqnet::sim
