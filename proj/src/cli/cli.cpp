#include "aqnet/cli/cli.hpp"

#include <atomic>
#include <chrono>
#include <csignal>
#include <cstdlib>
#include <filesystem>
#include <iomanip>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include "aqnet/analytics/correlation.hpp"
#include "aqnet/analytics/export.hpp"
#include "aqnet/analytics/idw.hpp"
#include "aqnet/analytics/qq.hpp"
#include "aqnet/cli/grid_api.hpp"
#include "aqnet/core/errors.hpp"
#include "aqnet/core/number.hpp"
#include "aqnet/http/http.hpp"
#include "aqnet/ingest/client.hpp"
#include "aqnet/ingest/server.hpp"
#include "aqnet/ingest/store.hpp"
#include "aqnet/sim/control_api.hpp"
#include "aqnet/sim/simulation.hpp"

namespace aqnet::cli {

namespace fs = std::filesystem;
using ingest::kMaxTime;
using ingest::kMinTime;

namespace {

class UsageError : public Error {
 public:
  using Error::Error;
};

std::atomic<bool> g_stop_requested{false};

extern "C" void on_stop_signal(int) { g_stop_requested.store(true); }

// Routes SIGINT and SIGTERM to g_stop_requested while alive.
class SignalScope {
 public:
  SignalScope() {
    g_stop_requested.store(false);
    struct sigaction sa {};
    sa.sa_handler = on_stop_signal;
    sigemptyset(&sa.sa_mask);
    sigaction(SIGINT, &sa, &old_int_);
    sigaction(SIGTERM, &sa, &old_term_);
  }
  ~SignalScope() {
    sigaction(SIGINT, &old_int_, nullptr);
    sigaction(SIGTERM, &old_term_, nullptr);
  }
  SignalScope(const SignalScope&) = delete;
  SignalScope& operator=(const SignalScope&) = delete;

 private:
  struct sigaction old_int_ {};
  struct sigaction old_term_ {};
};

std::string fixed(double v, int digits = 4) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(digits) << v;
  return s.str();
}

std::string compact_time(Timestamp t) {
  std::string s = format_iso8601(t);
  std::erase(s, '-');
  std::erase(s, ':');
  return s;
}

Timestamp time_flag(const std::string& text, const char* name, Timestamp fallback) {
  if (text.empty()) return fallback;
  const auto t = parse_timestamp(text);
  if (!t) throw UsageError(std::string("--") + name + ": cannot parse timestamp '" + text + "'");
  return *t;
}

AveragingWindow window_flag(const std::string& text) {
  const auto w = AveragingWindow::parse(text);
  if (!w) throw UsageError("--window: expected 5m, 1h, 1d or <n>s|m|h|d, got '" + text + "'");
  return *w;
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::vector<Parameter> param_flag(const std::string& text, std::vector<Parameter> all) {
  if (text == "all") return all;
  std::vector<Parameter> out;
  for (const auto& name : split_list(text)) {
    const auto p = parse_parameter(name);
    if (!p) throw UsageError("--param: unknown parameter '" + name + "'");
    out.push_back(*p);
  }
  if (out.empty()) throw UsageError("--param: no parameter given");
  return out;
}

fs::path output_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw Error("cannot create output directory " + dir);
  return dir;
}

std::string channel_label(const NodeDescriptor& n) {
  return "channel " + std::to_string(n.channel_id) + " (" + n.node_id + ")";
}

NodeDescriptor descriptor_of(const ingest::ChannelInfo& info) {
  NodeDescriptor n;
  n.node_id = info.node_id;
  n.display_name = info.display_name;
  n.location = info.location;
  n.channel_id = info.channel_id;
  n.kind = info.kind;
  return n;
}

void validate_source(const DataSource& src) {
  if (src.data_dir.empty() == src.server_url.empty()) {
    throw UsageError("exactly one of --data-dir or --server is required");
  }
}

// Flags shared by analyze, clean and export.
struct SourceFlags {
  std::string data_dir;
  std::string server;
  std::string nodes;
  std::string start;
  std::string end;
  std::string out = ".";

  void add(CLI::App& app) {
    app.add_option("--data-dir", data_dir, "Read a store directory directly (read-only; default $AQNET_DATA)");
    app.add_option("--server", server, "Read from a running server, e.g. http://127.0.0.1:8080");
    app.add_option("--nodes", nodes, "Comma-separated node ids (default: all channels)");
    app.add_option("--start", start, "Only entries at or after this time");
    app.add_option("--end", end, "Only entries before this time");
    app.add_option("--out", out, "Output directory")->capture_default_str();
  }

  std::vector<ChannelFeed> load() const {
    DataSource src{data_dir, server};
    if (src.data_dir.empty() && src.server_url.empty()) {
      if (const char* env = std::getenv("AQNET_DATA")) src.data_dir = env;
    }
    validate_source(src);
    return load_channels(src, split_list(nodes), time_flag(start, "start", kMinTime), time_flag(end, "end", kMaxTime));
  }
};

struct CleaningFlags {
  double eps = cleaning::ClusterParams{}.eps;
  int min_pts = cleaning::ClusterParams{}.min_pts;
  double eps_quantile = cleaning::ClusterParams{}.eps_quantile;
  double eps_scale = cleaning::ClusterParams{}.eps_scale;
  double rh_max = 0.0;

  void add(CLI::App& app) {
    app.add_option("--eps", eps, "Outlier neighbourhood radius in z-score units")->capture_default_str();
    app.add_option("--min-pts", min_pts, "Neighbours needed for a core point")->capture_default_str();
    app.add_option("--eps-quantile", eps_quantile,
                   "Raise eps to eps-scale times this quantile of the min-pts distance (0: fixed eps)")
        ->capture_default_str();
    app.add_option("--eps-scale", eps_scale, "Multiplier on the eps-quantile distance")->capture_default_str();
    app.add_option("--rh-max", rh_max, "Drop vectors with humidity above this percentage");
  }

  cleaning::CleanOptions options(const CLI::App& app) const {
    cleaning::CleanOptions o;
    o.cluster.eps = eps;
    o.cluster.min_pts = min_pts;
    o.cluster.eps_quantile = eps_quantile;
    o.cluster.eps_scale = eps_scale;
    if (app.count("--rh-max") > 0) o.rh_max = rh_max;
    cleaning::validate(o);
    return o;
  }
};

std::vector<cleaning::CleanedFeed> clean_all(const std::vector<ChannelFeed>& feeds,
                                             const cleaning::CleanOptions& options, std::ostream& out) {
  std::vector<cleaning::CleanedFeed> cleaned;
  for (const auto& f : feeds) {
    cleaned.push_back(cleaning::clean(f.feed, options));
    const auto& c = cleaned.back();
    if (c.dropped_noise > 0 || c.dropped_humidity > 0) {
      out << "cleaning " << f.node.node_id << ": dropped " << c.dropped_noise << " outlier and " << c.dropped_humidity
          << " humidity vectors of " << c.input_vectors << "\n";
    }
  }
  return cleaned;
}

// --- serve -----------------------------------------------------------------

struct ServeFlags {
  int port = 8080;
  std::string host = "127.0.0.1";
  std::string data_dir = "aqnet-data";
  std::string admin_key;
  std::string scenario;
  double speedup = 0.0;
  bool exit_when_done = false;
};

int cmd_serve(const ServeFlags& f, std::ostream& out) {
  std::optional<sim::ScenarioConfig> scenario;
  if (!f.scenario.empty()) {
    scenario = sim::load_scenario(f.scenario);
    if (f.speedup > 0.0) scenario->speedup = f.speedup;
    sim::validate(*scenario);
  }
  if (f.port < 0 || f.port > 65535) throw UsageError("--port must be in 0..65535");

  ingest::ChannelStore store(ingest::StoreOptions{f.data_dir});
  std::unique_ptr<sim::Simulation> simulation;
  if (scenario) simulation = std::make_unique<sim::Simulation>(*scenario);

  http::Server server;
  ingest::RouteOptions routes;
  routes.admin_key = f.admin_key;
  ingest::mount_ingest_routes(server, store, routes);
  if (simulation) sim::mount_control_routes(server, *simulation);
  mount_grid_routes(server, store);

  const int port = server.bind(f.host, f.port);
  SignalScope signals;
  server.start();
  spdlog::info("serving {} on {}:{}", f.data_dir, f.host, port);
  out << "listening on http://" << f.host << ":" << port << std::endl;

  std::atomic<bool> sim_done{false};
  std::thread sim_thread;
  if (simulation) {
    sim_thread = std::thread([&] {
      ingest::LocalIngestClient client(store);
      const sim::RunReport report = simulation->run(client);
      spdlog::info("scenario finished: {} ticks, {} sent, {} failed", report.ticks, report.total_sent(),
                   report.total_failed());
      sim_done.store(true);
    });
  }

  while (!g_stop_requested.load() && !(f.exit_when_done && sim_done.load())) {
    std::this_thread::sleep_for(std::chrono::milliseconds(50));
  }
  if (simulation) simulation->request_stop();
  if (sim_thread.joinable()) sim_thread.join();
  server.stop();
  store.flush();
  out << "stopped" << std::endl;
  return kExitOk;
}

// --- simulate --------------------------------------------------------------

struct SimulateFlags {
  std::string scenario;
  std::string server;
  double speedup = 0.0;
  std::string admin_key;
  int control_port = -1;
  std::string control_host = "127.0.0.1";
};

int cmd_simulate(const SimulateFlags& f, std::ostream& out) {
  sim::ScenarioConfig config = sim::load_scenario(f.scenario);
  if (!f.server.empty()) config.server_url = f.server;
  if (f.speedup > 0.0) config.speedup = f.speedup;
  sim::validate(config);

  {
    http::Client probe(config.server_url, 3.0);
    const auto r = probe.get("/channels.json");
    if (!r.transport_ok) throw Error("server unreachable at " + config.server_url + ": " + r.error);
  }

  sim::Simulation simulation(config);
  http::Server control;
  if (f.control_port >= 0) {
    sim::mount_control_routes(control, simulation);
    const int port = control.bind(f.control_host, f.control_port);
    control.start();
    out << "control api on http://" << f.control_host << ":" << port << std::endl;
  }

  SignalScope signals;
  std::atomic<bool> done{false};
  std::thread watcher([&] {
    while (!done.load()) {
      if (g_stop_requested.load()) {
        simulation.request_stop();
        return;
      }
      std::this_thread::sleep_for(std::chrono::milliseconds(50));
    }
  });

  ingest::HttpIngestClient client(config.server_url, f.admin_key);
  const sim::RunReport report = simulation.run(client);
  done.store(true);
  watcher.join();
  if (f.control_port >= 0) control.stop();

  for (const auto& n : report.nodes) {
    out << n.node_id << " channel " << n.channel_id << " sent " << n.sent << " failed " << n.failed << "\n";
  }
  out << "total sent " << report.total_sent() << " failed " << report.total_failed() << " ticks " << report.ticks
      << " wall " << fixed(report.wall_seconds, 1) << "s" << (report.stopped_early ? " (stopped early)" : "") << "\n";
  return report.total_failed() == 0 && !report.stopped_early ? kExitOk : kExitRuntime;
}

// --- analyze ---------------------------------------------------------------

struct AnalyzeFlags {
  SourceFlags source;
  CleaningFlags cleaning;
  std::string param;
  std::string window;
  std::size_t min_pairs = analytics::kDefaultMinPairs;
  std::string x;
  std::string y;
  std::size_t quantiles = 100;
  std::string at;
  int rows = 50;
  int cols = 50;
  std::string bbox;
  double power = analytics::kDefaultPower;
};

const cleaning::CleanedFeed& find_cleaned(const std::vector<cleaning::CleanedFeed>& cleaned,
                                          const std::string& node_id) {
  for (const auto& c : cleaned) {
    if (c.node_id == node_id) return c;
  }
  throw NotFoundError("node " + node_id + " has no channel");
}

int cmd_kendall(const AnalyzeFlags& f, const CLI::App& app, std::ostream& out) {
  const auto params = param_flag(f.param.empty() ? "pm25,pm10" : f.param, {Parameter::pm25, Parameter::pm10});
  const auto window = window_flag(f.window.empty() ? "5m" : f.window);
  const auto options = f.cleaning.options(app);
  const auto dir = output_dir(f.source.out);
  const auto feeds = f.source.load();
  if (feeds.size() < 2) {
    throw InsufficientDataError("kendall needs at least 2 channels, found " + std::to_string(feeds.size()));
  }
  const auto cleaned = clean_all(feeds, options, out);

  for (const Parameter p : params) {
    std::vector<TimeSeries> series;
    for (const auto& c : cleaned) series.push_back(c.get(p));
    const auto m = analytics::correlation_matrix(series, p, window, f.min_pairs);
    const std::string stem = "kendall_" + std::string(to_string(p));
    analytics::write_file((dir / (stem + ".csv")).string(), analytics::matrix_to_csv(m));
    analytics::write_file((dir / (stem + "_pairs.csv")).string(), analytics::pair_counts_to_csv(m));
    const auto range = m.off_diagonal_range();
    if (!range) {
      std::string detail;
      for (std::size_t i = 0; i < feeds.size(); ++i) {
        detail += (i ? ", " : "") + channel_label(feeds[i].node) + " has " + std::to_string(m.pair_counts[i][i]);
      }
      throw InsufficientDataError("kendall " + std::string(to_string(p)) + ": no pair has the needed " +
                                  std::to_string(f.min_pairs) + " aligned " + window.label() + " buckets (" + detail +
                                  ")");
    }
    out << "kendall " << to_string(p) << " window " << window.label() << " nodes " << m.node_ids.size()
        << " tau min " << fixed(range->first) << " max " << fixed(range->second) << "\n";
  }
  return kExitOk;
}

int cmd_qq(const AnalyzeFlags& f, const CLI::App& app, std::ostream& out) {
  const auto params = param_flag(f.param.empty() ? "pm25" : f.param, {Parameter::pm25, Parameter::pm10});
  const auto window = window_flag(f.window.empty() ? "1h" : f.window);
  const auto options = f.cleaning.options(app);
  if (f.quantiles < 1) throw UsageError("--quantiles must be >= 1");
  const auto dir = output_dir(f.source.out);
  const auto feeds = f.source.load();

  std::string x = f.x;
  std::string y = f.y;
  if (x.empty() || y.empty()) {
    if (feeds.size() != 2) throw UsageError("qq needs --x and --y unless exactly 2 channels are selected");
    x = feeds[0].node.node_id;
    y = feeds[1].node.node_id;
  }
  const auto cleaned = clean_all(feeds, options, out);

  const auto values = [&](const std::string& node, Parameter p) {
    std::vector<double> v;
    for (const auto& pt : window_average(find_cleaned(cleaned, node).get(p), window).points()) v.push_back(pt.value);
    if (v.size() < 2) {
      const auto it = std::find_if(feeds.begin(), feeds.end(), [&](const auto& c) { return c.node.node_id == node; });
      throw InsufficientDataError(channel_label(it->node) + " has " + std::to_string(v.size()) + " " + window.label() +
                                  " " + std::string(to_string(p)) + " values, need at least 2");
    }
    return v;
  };

  for (const Parameter p : params) {
    const auto qq = analytics::qq_pairs(values(x, p), values(y, p), f.quantiles);
    const std::string name = "qq_" + x + "_" + y + "_" + std::string(to_string(p)) + ".csv";
    analytics::write_file((dir / name).string(), analytics::qq_to_csv(qq));
    out << "qq " << x << " vs " << y << " " << to_string(p) << " window " << window.label() << " k " << f.quantiles
        << " max |delta| " << fixed(qq.max_abs_difference()) << "\n";
  }
  return kExitOk;
}

int cmd_idw(const AnalyzeFlags& f, const CLI::App& app, std::ostream& out) {
  const auto params = param_flag(f.param.empty() ? "pm10" : f.param, {Parameter::pm25, Parameter::pm10});
  const auto window = window_flag(f.window.empty() ? "5m" : f.window);
  const auto options = f.cleaning.options(app);
  if (f.at.empty()) throw UsageError("idw requires --at");
  const Timestamp at = time_flag(f.at, "at", 0);
  std::optional<analytics::BoundingBox> bbox;
  if (!f.bbox.empty()) {
    bbox = analytics::BoundingBox::parse(f.bbox);
    if (!bbox) throw UsageError("--bbox: expected lat_min,lon_min,lat_max,lon_max");
    bbox->validate();
  }
  if (f.rows < 2 || f.cols < 2) throw UsageError("--rows and --cols must be >= 2");
  const auto dir = output_dir(f.source.out);
  const auto feeds = f.source.load();
  if (feeds.empty()) throw InsufficientDataError("idw needs at least 1 channel, found 0");
  const auto cleaned = clean_all(feeds, options, out);

  for (const Parameter p : params) {
    std::vector<analytics::NodeSeries> series;
    for (std::size_t i = 0; i < feeds.size(); ++i) series.push_back({feeds[i].node, cleaned[i].get(p)});
    analytics::StationSelection sel;
    const auto grid = analytics::idw_grid_at(series, at, window, bbox, f.rows, f.cols, f.power, &sel);
    const std::string stem = "idw_" + std::string(to_string(p)) + "_" + compact_time(grid.timestamp);
    analytics::write_file((dir / (stem + ".geojson")).string(), analytics::grid_to_geojson(grid));
    analytics::write_file((dir / (stem + "_meta.json")).string(), analytics::grid_metadata_json(grid, sel.excluded));
    analytics::write_file((dir / (stem + ".csv")).string(), analytics::grid_to_csv(grid));

    out << "idw " << to_string(p) << " at " << format_iso8601(grid.timestamp) << " window " << window.label() << " "
        << grid.rows << "x" << grid.cols << " stations " << sel.stations.size() << " excluded ";
    if (sel.excluded.empty()) out << "none";
    for (std::size_t i = 0; i < sel.excluded.size(); ++i) out << (i ? "," : "") << sel.excluded[i].node_id;
    const auto [r, c] = grid.argmax();
    const GeoPoint peak = grid.cell_center(r, c);
    const analytics::StationValue* nearest = nullptr;
    double nearest_m = 0.0;
    for (const auto& s : grid.station_values) {
      const double d = haversine_distance(peak, s.node.location);
      if (!nearest || d < nearest_m) {
        nearest = &s;
        nearest_m = d;
      }
    }
    out << " min " << fixed(grid.min_value(), 2) << " max " << fixed(grid.max_value(), 2) << " at cell " << r << ","
        << c << " nearest " << nearest->node.node_id << " (" << fixed(nearest_m, 0) << " m)\n";
  }
  return kExitOk;
}

// --- clean / export --------------------------------------------------------

int cmd_clean(const SourceFlags& src, const CleaningFlags& cf, const std::string& window_text, const CLI::App& app,
              std::ostream& out) {
  const auto options = cf.options(app);
  std::optional<AveragingWindow> window;
  if (!window_text.empty()) window = window_flag(window_text);
  const auto dir = output_dir(src.out);
  const auto feeds = src.load();
  for (const auto& f : feeds) {
    auto c = cleaning::clean(f.feed, options);
    if (window) {
      for (auto& [p, s] : c.series) s = window_average(s, *window);
    }
    std::map<Timestamp, std::array<std::string, 4>> rows;
    for (std::size_t i = 0; i < kAllParameters.size(); ++i) {
      for (const auto& pt : c.get(kAllParameters[i]).points()) rows[pt.timestamp][i] = format_number(pt.value);
    }
    std::string doc = "created_at,pm25,pm10,temperature,humidity\n";
    for (const auto& [t, v] : rows) doc += format_iso8601(t) + "," + v[0] + "," + v[1] + "," + v[2] + "," + v[3] + "\n";
    analytics::write_file((dir / ("clean_" + f.node.node_id + ".csv")).string(), doc);
    out << f.node.node_id << " vectors " << c.input_vectors << " dropped outlier " << c.dropped_noise << " humidity "
        << c.dropped_humidity << " kept " << rows.size() << (window ? " rows averaged" : " rows") << "\n";
  }
  return kExitOk;
}

int cmd_export(const SourceFlags& src, std::ostream& out) {
  const auto dir = output_dir(src.out);
  const auto feeds = src.load();
  for (const auto& f : feeds) {
    std::string doc(ingest::kCsvHeader);
    doc += '\n';
    for (std::size_t i = 0; i < f.feed.samples.size(); ++i) {
      doc += ingest::format_csv_row({f.entry_ids[i], f.feed.samples[i]}) + "\n";
    }
    const std::string name = "channel_" + std::to_string(f.node.channel_id) + ".csv";
    analytics::write_file((dir / name).string(), doc);
    out << f.node.node_id << " -> " << name << " (" << f.feed.samples.size() << " entries)\n";
  }
  return kExitOk;
}

}  // namespace

std::vector<ChannelFeed> load_channels(const DataSource& source, const std::vector<std::string>& node_ids,
                                       Timestamp t0, Timestamp t1) {
  validate_source(source);
  const std::set<std::string> wanted(node_ids.begin(), node_ids.end());
  std::vector<ChannelFeed> out;
  std::set<std::string> found;

  const auto keep = [&](const ingest::ChannelInfo& info) {
    if (!wanted.empty() && !wanted.contains(info.node_id)) return false;
    found.insert(info.node_id);
    return true;
  };
  const auto add = [&](const ingest::ChannelInfo& info, const std::vector<ingest::Entry>& entries) {
    ChannelFeed cf{descriptor_of(info), {info.node_id, {}}, {}};
    cf.feed.samples.reserve(entries.size());
    for (const auto& e : entries) {
      cf.feed.samples.push_back(e.sample);
      cf.entry_ids.push_back(e.entry_id);
    }
    out.push_back(std::move(cf));
  };

  if (!source.data_dir.empty()) {
    if (!fs::is_directory(source.data_dir)) throw Error("data directory " + source.data_dir + " does not exist");
    ingest::ChannelStore store(ingest::StoreOptions{source.data_dir, 1, true});
    for (const auto& info : store.channels()) {
      if (keep(info)) add(info, store.range(info.channel_id, t0, t1));
    }
  } else {
    http::Client client(source.server_url, 30.0);
    for (const auto& info : ingest::fetch_channels(client)) {
      if (keep(info)) add(info, ingest::fetch_feed(client, info.channel_id, t0, t1));
    }
  }
  for (const auto& id : wanted) {
    if (!found.contains(id)) throw NotFoundError("node " + id + " has no channel");
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.node.channel_id < b.node.channel_id; });
  return out;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Air-quality sensor network: ingest server, simulator, cleaning and analyses"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for all subcommands");

  ServeFlags serve;
  auto* serve_cmd = app.add_subcommand("serve", "Run the channel ingest server");
  serve_cmd->add_option("--port", serve.port, "Listen port (0 picks a free port)")->envname("AQNET_PORT")->capture_default_str();
  serve_cmd->add_option("--host", serve.host, "Listen address")->capture_default_str();
  serve_cmd->add_option("--data-dir", serve.data_dir, "Store directory")->envname("AQNET_DATA")->capture_default_str();
  serve_cmd->add_option("--admin-key", serve.admin_key, "Key required to register channels")->envname("AQNET_ADMIN_KEY");
  serve_cmd->add_option("--scenario", serve.scenario, "Also run this scenario in-process and expose /sim/*");
  serve_cmd->add_option("--speedup", serve.speedup, "Override the scenario speedup");
  serve_cmd->add_flag("--exit-when-done", serve.exit_when_done, "Stop once the scenario has finished");

  SimulateFlags simulate;
  auto* sim_cmd = app.add_subcommand("simulate", "Run a scenario against an ingest server");
  sim_cmd->add_option("--scenario", simulate.scenario, "Scenario file")->required();
  sim_cmd->add_option("--server", simulate.server, "Server URL (default: from the scenario)");
  sim_cmd->add_option("--speedup", simulate.speedup, "Simulated seconds per wall second");
  sim_cmd->add_option("--admin-key", simulate.admin_key, "Admin key for channel registration")->envname("AQNET_ADMIN_KEY");
  sim_cmd->add_option("--control-port", simulate.control_port, "Serve /sim/* on this port (0 picks one)");
  sim_cmd->add_option("--control-host", simulate.control_host, "Control API address")->capture_default_str();

  AnalyzeFlags analyze;
  auto* analyze_cmd = app.add_subcommand("analyze", "Clean channel data and run an analysis");
  analyze_cmd->require_subcommand(1);
  const auto add_analysis = [&](const char* name, const char* help) {
    auto* cmd = analyze_cmd->add_subcommand(name, help);
    analyze.source.add(*cmd);
    analyze.cleaning.add(*cmd);
    cmd->add_option("--param", analyze.param, "pm25, pm10, or a comma list");
    cmd->add_option("--window", analyze.window, "Averaging window: 5m, 1h, 1d or <n>s|m|h|d");
    return cmd;
  };
  auto* kendall_cmd = add_analysis("kendall", "Pairwise Kendall tau matrix (default window 5m, pm25 and pm10)");
  kendall_cmd->add_option("--min-pairs", analyze.min_pairs, "Aligned buckets needed per entry")->capture_default_str();
  auto* qq_cmd = add_analysis("qq", "Quantile pairs between two nodes (default window 1h, pm25)");
  qq_cmd->add_option("--x", analyze.x, "Node on the x axis");
  qq_cmd->add_option("--y", analyze.y, "Node on the y axis");
  qq_cmd->add_option("--quantiles", analyze.quantiles, "Number of quantiles")->capture_default_str();
  auto* idw_cmd = add_analysis("idw", "IDW raster at one timestamp (default window 5m, pm10)");
  idw_cmd->add_option("--at", analyze.at, "Timestamp (ISO-8601 or epoch seconds)")->required();
  idw_cmd->add_option("--rows", analyze.rows, "Grid rows")->capture_default_str();
  idw_cmd->add_option("--cols", analyze.cols, "Grid columns")->capture_default_str();
  idw_cmd->add_option("--bbox", analyze.bbox, "lat_min,lon_min,lat_max,lon_max (default: stations + 10%)");
  idw_cmd->add_option("--power", analyze.power, "Distance exponent")->capture_default_str();

  SourceFlags clean_src;
  CleaningFlags clean_flags;
  std::string clean_window;
  auto* clean_cmd = app.add_subcommand("clean", "Write cleaned per-node CSVs");
  clean_src.add(*clean_cmd);
  clean_flags.add(*clean_cmd);
  clean_cmd->add_option("--window", clean_window, "Also average into this window");

  SourceFlags export_src;
  auto* export_cmd = app.add_subcommand("export", "Write each channel's raw CSV");
  export_src.add(*export_cmd);

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*serve_cmd) return cmd_serve(serve, out);
    if (*sim_cmd) return cmd_simulate(simulate, out);
    if (*kendall_cmd) return cmd_kendall(analyze, *kendall_cmd, out);
    if (*qq_cmd) return cmd_qq(analyze, *qq_cmd, out);
    if (*idw_cmd) return cmd_idw(analyze, *idw_cmd, out);
    if (*clean_cmd) return cmd_clean(clean_src, clean_flags, clean_window, *clean_cmd, out);
    if (*export_cmd) return cmd_export(export_src, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ValidationError& e) {
    err << "error: " << e.what();
    for (const auto& [k, v] : e.fields()) err << "\n  " << k << ": " << v;
    err << "\n";
    return kExitUsage;
  } catch (const InsufficientDataError& e) {
    err << "insufficient data: " << e.what() << "\n";
    return kExitInsufficientData;
  } catch (const NotFoundError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitUsage;
}

}  // namespace aqnet::cli
