#include "aqnet/sim/simulation.hpp"

#include <chrono>
#include <spdlog/spdlog.h>

#include "aqnet/core/errors.hpp"

namespace aqnet::sim {

namespace {
constexpr std::size_t kMaxReportedErrors = 20;
}

std::int64_t RunReport::total_attempted() const noexcept {
  std::int64_t n = 0;
  for (const auto& r : nodes) n += r.attempted;
  return n;
}

std::int64_t RunReport::total_sent() const noexcept {
  std::int64_t n = 0;
  for (const auto& r : nodes) n += r.sent;
  return n;
}

std::int64_t RunReport::total_failed() const noexcept {
  std::int64_t n = 0;
  for (const auto& r : nodes) n += r.failed;
  return n;
}

Simulation::Simulation(ScenarioConfig config) : initial_(std::move(config)), state_(initial_), clock_(initial_.start) {
  validate(initial_);
  for (const auto& n : initial_.nodes) {
    counters_.push_back({n.descriptor.node_id, n.descriptor.channel_id, n.descriptor.online, 0, 0, 0});
  }
}

std::int64_t Simulation::inject_event(BurstEvent event) {
  validate(event);
  event.id = next_event_id_.fetch_add(1);
  std::lock_guard lock(queue_mutex_);
  queue_.push_back({event, {}, true});
  pending_.push_back(event);
  return event.id;
}

void Simulation::set_node_online(const std::string& node_id, bool online) {
  if (initial_.find_node(node_id) < 0) throw NotFoundError("node " + node_id + " not found");
  std::lock_guard lock(queue_mutex_);
  queue_.push_back({std::nullopt, node_id, online});
}

void Simulation::apply_pending_controls() {
  std::scoped_lock lock(state_mutex_, queue_mutex_);
  for (const Control& c : queue_) {
    if (c.event) {
      state_.field.events.push_back(*c.event);
    } else {
      const int idx = state_.find_node(c.node_id);
      state_.nodes[static_cast<std::size_t>(idx)].descriptor.online = c.online;
      counters_[static_cast<std::size_t>(idx)].online = c.online;
    }
  }
  queue_.clear();
  pending_.clear();
}

void Simulation::request_stop() {
  {
    std::lock_guard lock(stop_mutex_);
    stop_requested_ = true;
  }
  stop_cv_.notify_all();
}

RunReport Simulation::run(ingest::IngestClient& client) {
  using clock = std::chrono::steady_clock;
  const auto wall_start = clock::now();
  {
    std::lock_guard lock(state_mutex_);
    running_ = true;
    finished_ = false;
  }

  const std::size_t n = initial_.nodes.size();
  RunReport report;
  std::vector<SampleRng> rngs;
  rngs.reserve(n);
  for (std::size_t i = 0; i < n; ++i) rngs.emplace_back(initial_.rng_seed, i);

  const auto note_error = [&report](std::string msg) {
    if (report.errors.size() < kMaxReportedErrors) {
      spdlog::warn("{}", msg);
      report.errors.push_back(std::move(msg));
    }
  };

  std::vector<std::optional<ingest::ChannelBinding>> bindings(n);
  const auto bind = [&](std::size_t i) {
    try {
      bindings[i] = client.ensure_channel(initial_.nodes[i].descriptor);
      std::lock_guard lock(state_mutex_);
      counters_[i].channel_id = bindings[i]->channel_id;
    } catch (const std::exception& e) {
      note_error(e.what());
    }
  };
  for (std::size_t i = 0; i < n; ++i) bind(i);

  const double speedup = initial_.speedup;
  for (Timestamp t = initial_.start; t < initial_.end; t += initial_.sample_interval) {
    const auto target = wall_start + std::chrono::duration_cast<clock::duration>(std::chrono::duration<double>(
                                         static_cast<double>(t - initial_.start) / speedup));
    {
      std::unique_lock lock(stop_mutex_);
      if (stop_cv_.wait_until(lock, target, [this] { return stop_requested_; })) {
        report.stopped_early = true;
        break;
      }
    }

    apply_pending_controls();
    std::vector<NodeConfig> nodes;
    PollutionField field;
    AmbientProfile ambient;
    {
      std::lock_guard lock(state_mutex_);
      clock_ = t;
      nodes = state_.nodes;
      field = state_.field;
      ambient = state_.ambient;
    }

    for (std::size_t i = 0; i < n; ++i) {
      const auto sample = sample_node(nodes[i].descriptor, nodes[i].noise, field, ambient, t, rngs[i]);
      if (!sample) continue;

      bool ok = false;
      if (!bindings[i]) bind(i);
      if (bindings[i]) {
        auto result = client.upload(*bindings[i], *sample);
        if (!result.ok) result = client.upload(*bindings[i], *sample);
        ok = result.ok;
        if (!ok) {
          note_error("upload " + nodes[i].descriptor.node_id + " @" + format_iso8601(t) + " failed: " + result.error);
        }
      }
      std::lock_guard lock(state_mutex_);
      auto& c = counters_[i];
      ++c.attempted;
      ++(ok ? c.sent : c.failed);
    }
    ++report.ticks;
  }

  {
    std::lock_guard lock(state_mutex_);
    running_ = false;
    finished_ = true;
    report.nodes = counters_;
  }
  report.wall_seconds = std::chrono::duration<double>(clock::now() - wall_start).count();
  return report;
}

SimStatus Simulation::status() const {
  std::scoped_lock lock(state_mutex_, queue_mutex_);
  SimStatus s;
  s.clock = clock_;
  s.running = running_;
  s.finished = finished_;
  s.nodes = counters_;
  s.events = state_.field.events;
  s.pending_events = pending_;
  return s;
}

PollutionField Simulation::field() const {
  std::lock_guard lock(state_mutex_);
  return state_.field;
}

std::vector<NodeConfig> Simulation::nodes() const {
  std::lock_guard lock(state_mutex_);
  return state_.nodes;
}

}  // namespace aqnet::sim
