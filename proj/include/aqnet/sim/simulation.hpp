#pragma once

#include <atomic>
#include <condition_variable>
#include <cstdint>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "aqnet/ingest/client.hpp"
#include "aqnet/sim/scenario.hpp"

namespace aqnet::sim {

struct NodeReport {
  std::string node_id;
  int channel_id = 0;
  bool online = true;
  std::int64_t attempted = 0;
  std::int64_t sent = 0;
  std::int64_t failed = 0;
};

struct RunReport {
  std::vector<NodeReport> nodes;
  std::int64_t ticks = 0;
  double wall_seconds = 0.0;
  bool stopped_early = false;
  /// First few failure messages; the counters above are authoritative.
  std::vector<std::string> errors;

  std::int64_t total_attempted() const noexcept;
  std::int64_t total_sent() const noexcept;
  std::int64_t total_failed() const noexcept;
};

struct SimStatus {
  Timestamp clock = 0;
  bool running = false;
  bool finished = false;
  std::vector<NodeReport> nodes;
  std::vector<BurstEvent> events;
  std::vector<BurstEvent> pending_events;
};

/// A running deployment: one simulated clock, one sampler per node, and a
/// control queue.
///
/// inject_event() and set_node_online() may be called from any thread. They
/// are validated immediately, queued, and applied by run() at the next tick
/// boundary (or by an explicit apply_pending_controls()).
class Simulation {
 public:
  explicit Simulation(ScenarioConfig config);

  /// Throws ValidationError. Returns the assigned event id.
  std::int64_t inject_event(BurstEvent event);
  /// Throws NotFoundError for an unknown node.
  void set_node_online(const std::string& node_id, bool online);
  /// Applies queued control operations now. Called by run() at every tick.
  void apply_pending_controls();

  /// Registers every node's channel, then emits one sample per online node per
  /// sample_interval of simulated time over [start, end). The simulated clock
  /// advances at `speedup` times wall time. Each failed upload is retried once,
  /// then counted and the run continues.
  RunReport run(ingest::IngestClient& client);

  /// Makes an active run() return at the next tick.
  void request_stop();

  SimStatus status() const;
  PollutionField field() const;
  std::vector<NodeConfig> nodes() const;
  const ScenarioConfig& initial_config() const noexcept { return initial_; }

 private:
  struct Control {
    std::optional<BurstEvent> event;
    std::string node_id;
    bool online = true;
  };

  const ScenarioConfig initial_;

  mutable std::mutex state_mutex_;
  ScenarioConfig state_;  // written by the control path, under state_mutex_
  std::vector<NodeReport> counters_;
  Timestamp clock_;
  bool running_ = false;
  bool finished_ = false;

  mutable std::mutex queue_mutex_;
  std::vector<Control> queue_;
  std::vector<BurstEvent> pending_;  // guarded by queue_mutex_
  std::atomic<std::int64_t> next_event_id_{1};

  std::mutex stop_mutex_;
  std::condition_variable stop_cv_;
  bool stop_requested_ = false;
};

}  // namespace aqnet::sim
