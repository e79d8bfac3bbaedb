#pragma once

#include <cstdint>
#include <filesystem>
#include <limits>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>
#include <unordered_map>
#include <vector>

#include "aqnet/core/sample.hpp"
#include "aqnet/ingest/append_log.hpp"
#include "aqnet/ingest/protocol.hpp"

namespace aqnet::ingest {

inline constexpr Timestamp kMinTime = std::numeric_limits<Timestamp>::min();
inline constexpr Timestamp kMaxTime = std::numeric_limits<Timestamp>::max();

/// Public channel metadata (never includes the write key).
struct ChannelInfo {
  int channel_id = 0;
  std::string node_id;
  std::string display_name;
  GeoPoint location{0.0, 0.0};
  NodeKind kind = NodeKind::developed;
  Timestamp created_at = 0;
};

struct ChannelBinding {
  int channel_id = 0;
  std::string write_key;
};

enum class UpdateStatus { accepted, unauthorized, bad_request };

struct UpdateResult {
  UpdateStatus status = UpdateStatus::bad_request;
  std::int64_t entry_id = 0;  // 0 unless accepted
};

struct StoreOptions {
  /// Empty keeps everything in memory.
  std::filesystem::path data_dir;
  /// Flush the channel log after this many accepted updates.
  int flush_every = 1;
  /// Load existing data without creating, repairing or writing any file.
  bool read_only = false;
};

/// Registry of channels plus their append-ordered entries.
///
/// On disk: `channels.json` holds the registry; `channel_<id>.csv` is the
/// append-only log of each channel in the export CSV format. Logs are flushed
/// before an update is acknowledged (with flush_every = 1), so every
/// acknowledged entry survives a process restart.
///
/// Appends to one channel are serialized; entry reads are lock-free and see a
/// prefix of the channel that never includes a partially applied update.
class ChannelStore {
 public:
  explicit ChannelStore(StoreOptions options = {});
  ~ChannelStore();
  ChannelStore(const ChannelStore&) = delete;
  ChannelStore& operator=(const ChannelStore&) = delete;

  /// Throws ConflictError if node_id is already bound.
  ChannelBinding register_channel(const NodeDescriptor& node, Timestamp now);

  UpdateResult handle_update(const UpdateQuery& query, Timestamp server_now);

  /// Highest entry; nullopt for an empty channel. Throws NotFoundError.
  std::optional<Entry> latest(int channel_id) const;

  /// Entries with t0 <= created_at < t1 in entry order, keeping only the newest
  /// `max_results` when set. Throws ValidationError if t0 > t1, NotFoundError.
  std::vector<Entry> range(int channel_id, Timestamp t0, Timestamp t1,
                           std::optional<std::size_t> max_results = std::nullopt) const;

  std::string export_csv(int channel_id, Timestamp t0 = kMinTime, Timestamp t1 = kMaxTime) const;

  ChannelInfo channel(int channel_id) const;
  std::vector<ChannelInfo> channels() const;
  std::optional<ChannelBinding> binding_for_node(const std::string& node_id) const;
  std::size_t entry_count(int channel_id) const;

  void flush();

 private:
  struct ChannelState;

  const ChannelState& state(int channel_id) const;
  void load();
  void save_registry() const;
  std::filesystem::path log_path(int channel_id) const;

  StoreOptions options_;
  AppendLog<std::unique_ptr<ChannelState>, 64, 1024> channels_;
  mutable std::shared_mutex registry_mutex_;
  std::unordered_map<std::string, int> by_key_;
  std::unordered_map<std::string, int> by_node_;
};

}  // namespace aqnet::ingest
