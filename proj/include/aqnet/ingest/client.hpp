#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "aqnet/http/http.hpp"
#include "aqnet/ingest/store.hpp"

namespace aqnet::ingest {

struct UploadResult {
  bool ok = false;
  std::int64_t entry_id = 0;
  std::string error;
};

/// Write side of the channel protocol as seen by a sensor node.
class IngestClient {
 public:
  virtual ~IngestClient() = default;

  /// Registers the node, or returns its existing binding if already registered.
  virtual ChannelBinding ensure_channel(const NodeDescriptor& node) = 0;
  virtual UploadResult upload(const ChannelBinding& binding, const SensorSample& sample) = 0;
};

/// Feeds a ChannelStore in the same process, going through the same query
/// encoding as the HTTP path.
class LocalIngestClient final : public IngestClient {
 public:
  explicit LocalIngestClient(ChannelStore& store);

  ChannelBinding ensure_channel(const NodeDescriptor& node) override;
  UploadResult upload(const ChannelBinding& binding, const SensorSample& sample) override;

 private:
  ChannelStore& store_;
};

/// Talks to an ingest server over HTTP: POST /channels and GET /update.
class HttpIngestClient final : public IngestClient {
 public:
  HttpIngestClient(const std::string& server_url, std::string admin_key, double timeout_seconds = 5.0);

  ChannelBinding ensure_channel(const NodeDescriptor& node) override;
  UploadResult upload(const ChannelBinding& binding, const SensorSample& sample) override;

 private:
  http::Client client_;
  std::string admin_key_;
};

/// Read side over HTTP. Throw aqnet::Error on transport or protocol failure.
std::vector<ChannelInfo> fetch_channels(http::Client& client);
std::vector<Entry> fetch_feed(http::Client& client, int channel_id, Timestamp t0 = kMinTime,
                              Timestamp t1 = kMaxTime);

}  // namespace aqnet::ingest
