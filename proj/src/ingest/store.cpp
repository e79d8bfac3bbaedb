#include "aqnet/ingest/store.hpp"

#include <algorithm>
#include <fstream>
#include <json.hpp>
#include <mutex>
#include <random>
#include <sstream>

#include "aqnet/core/errors.hpp"

namespace aqnet::ingest {

namespace fs = std::filesystem;
using nlohmann::json;

struct ChannelStore::ChannelState {
  ChannelInfo info;
  std::string write_key;
  AppendLog<Entry> entries;

  // Guarded by append_mutex.
  std::mutex append_mutex;
  std::ofstream log;
  int unflushed = 0;
  Timestamp last_created_at = kMinTime;
};

namespace {

std::string random_write_key(std::mt19937_64& rng) {
  static constexpr std::string_view kAlphabet = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789";
  std::uniform_int_distribution<std::size_t> pick(0, kAlphabet.size() - 1);
  std::string key(16, ' ');
  for (char& c : key) c = kAlphabet[pick(rng)];
  return key;
}

std::mt19937_64& key_rng() {
  static std::mt19937_64 rng{std::random_device{}()};
  return rng;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

ChannelStore::ChannelStore(StoreOptions options) : options_(std::move(options)) {
  if (options_.flush_every < 1) throw ValidationError("flush_every must be >= 1");
  if (options_.data_dir.empty()) return;
  if (!options_.read_only) {
    std::error_code ec;
    fs::create_directories(options_.data_dir, ec);
    if (ec || !fs::is_directory(options_.data_dir)) {
      throw Error("data directory " + options_.data_dir.string() + " is not usable: " + ec.message());
    }
    // Probe writability up front so a bad directory fails before serving.
    const fs::path probe = options_.data_dir / ".write_probe";
    {
      std::ofstream out(probe);
      if (!out) throw Error("data directory " + options_.data_dir.string() + " is not writable");
    }
    fs::remove(probe, ec);
  } else if (!fs::is_directory(options_.data_dir)) {
    throw Error("data directory " + options_.data_dir.string() + " does not exist");
  }
  load();
}

ChannelStore::~ChannelStore() {
  try {
    flush();
  } catch (...) {
  }
}

fs::path ChannelStore::log_path(int channel_id) const {
  return options_.data_dir / ("channel_" + std::to_string(channel_id) + ".csv");
}

void ChannelStore::load() {
  const fs::path registry = options_.data_dir / "channels.json";
  if (!fs::exists(registry)) return;
  const json doc = json::parse(read_file(registry));
  for (const auto& c : doc.at("channels")) {
    auto st = std::make_unique<ChannelState>();
    st->info.channel_id = c.at("channel_id").get<int>();
    st->info.node_id = c.at("node_id").get<std::string>();
    st->info.display_name = c.value("display_name", st->info.node_id);
    st->info.location = GeoPoint(c.at("latitude").get<double>(), c.at("longitude").get<double>());
    st->info.kind = parse_node_kind(c.value("kind", "developed")).value_or(NodeKind::developed);
    st->info.created_at = c.value("created_at", Timestamp{0});
    st->write_key = c.at("write_key").get<std::string>();
    if (st->info.channel_id != static_cast<int>(channels_.size()) + 1) {
      throw Error("channels.json: channel ids must be consecutive from 1");
    }

    const fs::path path = log_path(st->info.channel_id);
    if (fs::exists(path)) {
      std::string text = read_file(path);
      // A crash can leave a partial trailing line; it was never acknowledged.
      const std::size_t last_nl = text.rfind('\n');
      const std::size_t keep = last_nl == std::string::npos ? 0 : last_nl + 1;
      if (keep != text.size()) {
        text.resize(keep);
        if (!options_.read_only) fs::resize_file(path, keep);
      }
      if (!text.empty()) {
        const auto entries = parse_csv(text);
        for (std::size_t i = 0; i < entries.size(); ++i) {
          if (entries[i].entry_id != static_cast<std::int64_t>(i) + 1) {
            throw Error(path.string() + ": entry ids are not gap-free at entry " + std::to_string(i + 1));
          }
          st->last_created_at = std::max(st->last_created_at, entries[i].sample.timestamp);
          st->entries.push_back(entries[i]);
        }
      }
    }
    if (!options_.read_only) {
      const bool fresh = !fs::exists(path) || fs::file_size(path) == 0;
      st->log.open(path, std::ios::app | std::ios::binary);
      if (!st->log) throw Error("cannot open " + path.string() + " for append");
      if (fresh) st->log << kCsvHeader << '\n' << std::flush;
    }
    by_key_[st->write_key] = st->info.channel_id;
    by_node_[st->info.node_id] = st->info.channel_id;
    channels_.push_back(std::move(st));
  }
}

void ChannelStore::save_registry() const {
  json doc{{"channels", json::array()}};
  for (std::size_t i = 0; i < channels_.size(); ++i) {
    const auto& st = *channels_[i];
    doc["channels"].push_back({{"channel_id", st.info.channel_id},
                               {"node_id", st.info.node_id},
                               {"display_name", st.info.display_name},
                               {"latitude", st.info.location.lat()},
                               {"longitude", st.info.location.lon()},
                               {"kind", to_string(st.info.kind)},
                               {"created_at", st.info.created_at},
                               {"write_key", st.write_key}});
  }
  const fs::path tmp = options_.data_dir / "channels.json.tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    out << doc.dump(2) << '\n';
    out.flush();
    if (!out) throw Error("cannot write " + tmp.string());
  }
  fs::rename(tmp, options_.data_dir / "channels.json");
}

ChannelBinding ChannelStore::register_channel(const NodeDescriptor& node, Timestamp now) {
  if (options_.read_only) throw Error("store is read-only");
  if (node.node_id.empty()) throw ValidationError("node_id is required", {{"node_id", "must not be empty"}});
  std::unique_lock lock(registry_mutex_);
  if (by_node_.contains(node.node_id)) throw ConflictError("node " + node.node_id + " is already bound to a channel");

  auto st = std::make_unique<ChannelState>();
  st->info.channel_id = static_cast<int>(channels_.size()) + 1;
  st->info.node_id = node.node_id;
  st->info.display_name = node.display_name.empty() ? node.node_id : node.display_name;
  st->info.location = node.location;
  st->info.kind = node.kind;
  st->info.created_at = now;
  do {
    st->write_key = random_write_key(key_rng());
  } while (by_key_.contains(st->write_key));

  if (!options_.data_dir.empty()) {
    const fs::path path = log_path(st->info.channel_id);
    st->log.open(path, std::ios::trunc | std::ios::binary);
    if (!st->log) throw Error("cannot create " + path.string());
    st->log << kCsvHeader << '\n' << std::flush;
  }

  ChannelBinding binding{st->info.channel_id, st->write_key};
  by_key_[st->write_key] = binding.channel_id;
  by_node_[node.node_id] = binding.channel_id;
  channels_.push_back(std::move(st));
  if (!options_.data_dir.empty()) save_registry();
  return binding;
}

UpdateResult ChannelStore::handle_update(const UpdateQuery& query, Timestamp server_now) {
  int channel_id = 0;
  {
    std::shared_lock lock(registry_mutex_);
    const auto it = by_key_.find(query.api_key);
    if (it == by_key_.end()) return {UpdateStatus::unauthorized, 0};
    channel_id = it->second;
  }
  if (options_.read_only) return {UpdateStatus::bad_request, 0};

  SensorSample sample = decode_fields(query);
  if (sample.empty()) return {UpdateStatus::bad_request, 0};

  auto& st = *channels_[static_cast<std::size_t>(channel_id) - 1];
  std::lock_guard lock(st.append_mutex);
  std::optional<Timestamp> created = query.created_at ? parse_iso8601(*query.created_at) : std::nullopt;
  sample.timestamp = created ? *created : std::max(server_now, st.last_created_at);

  Entry entry{static_cast<std::int64_t>(st.entries.size()) + 1, sample};
  if (st.log.is_open()) {
    st.log << format_csv_row(entry) << '\n';
    if (++st.unflushed >= options_.flush_every) {
      st.log.flush();
      st.unflushed = 0;
    }
    if (!st.log) throw Error("write to channel " + std::to_string(channel_id) + " log failed");
  }
  st.last_created_at = std::max(st.last_created_at, sample.timestamp);
  st.entries.push_back(entry);
  return {UpdateStatus::accepted, entry.entry_id};
}

const ChannelStore::ChannelState& ChannelStore::state(int channel_id) const {
  if (channel_id < 1 || static_cast<std::size_t>(channel_id) > channels_.size()) {
    throw NotFoundError("channel " + std::to_string(channel_id) + " not found");
  }
  return *channels_[static_cast<std::size_t>(channel_id) - 1];
}

std::optional<Entry> ChannelStore::latest(int channel_id) const {
  const auto& st = state(channel_id);
  const std::size_t n = st.entries.size();
  if (n == 0) return std::nullopt;
  return st.entries[n - 1];
}

std::vector<Entry> ChannelStore::range(int channel_id, Timestamp t0, Timestamp t1,
                                       std::optional<std::size_t> max_results) const {
  if (t0 > t1) throw ValidationError("range start is after end", {{"start", "must be <= end"}});
  const auto& st = state(channel_id);
  const std::size_t n = st.entries.size();
  std::vector<Entry> out;
  for (std::size_t i = 0; i < n; ++i) {
    const Entry& e = st.entries[i];
    if (e.sample.timestamp >= t0 && e.sample.timestamp < t1) out.push_back(e);
  }
  if (max_results && out.size() > *max_results) {
    out.erase(out.begin(), out.end() - static_cast<std::ptrdiff_t>(*max_results));
  }
  return out;
}

std::string ChannelStore::export_csv(int channel_id, Timestamp t0, Timestamp t1) const {
  std::string doc(kCsvHeader);
  doc += '\n';
  for (const Entry& e : range(channel_id, t0, t1)) {
    doc += format_csv_row(e);
    doc += '\n';
  }
  return doc;
}

ChannelInfo ChannelStore::channel(int channel_id) const { return state(channel_id).info; }

std::vector<ChannelInfo> ChannelStore::channels() const {
  std::vector<ChannelInfo> out;
  const std::size_t n = channels_.size();
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(channels_[i]->info);
  return out;
}

std::optional<ChannelBinding> ChannelStore::binding_for_node(const std::string& node_id) const {
  std::shared_lock lock(registry_mutex_);
  const auto it = by_node_.find(node_id);
  if (it == by_node_.end()) return std::nullopt;
  return ChannelBinding{it->second, channels_[static_cast<std::size_t>(it->second) - 1]->write_key};
}

std::size_t ChannelStore::entry_count(int channel_id) const { return state(channel_id).entries.size(); }

void ChannelStore::flush() {
  const std::size_t n = channels_.size();
  for (std::size_t i = 0; i < n; ++i) {
    auto& st = *channels_[i];
    std::lock_guard lock(st.append_mutex);
    if (st.log.is_open()) {
      st.log.flush();
      st.unflushed = 0;
    }
  }
}

}  // namespace aqnet::ingest
