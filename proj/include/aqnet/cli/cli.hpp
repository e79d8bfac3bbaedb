#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "aqnet/cleaning/cleaning.hpp"
#include "aqnet/core/sample.hpp"

namespace aqnet::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitRuntime = 2;
inline constexpr int kExitInsufficientData = 3;

/// Where analyze/clean/export read channels from. Exactly one of the two is set.
struct DataSource {
  std::string data_dir;
  std::string server_url;
};

struct ChannelFeed {
  NodeDescriptor node;
  cleaning::NodeFeed feed;
  std::vector<std::int64_t> entry_ids;  // parallel to feed.samples
};

/// Channels in id order with their entries in [t0, t1). `node_ids` restricts
/// the selection; an unknown id throws NotFoundError. Never writes.
std::vector<ChannelFeed> load_channels(const DataSource& source, const std::vector<std::string>& node_ids,
                                       Timestamp t0, Timestamp t1);

/// Runs one command line (args[0] is the program name). Output goes to `out`,
/// diagnostics to `err`. Returns the process exit code.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace aqnet::cli
