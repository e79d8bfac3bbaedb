#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace aqnet::http {

using Params = std::vector<std::pair<std::string, std::string>>;

struct Request {
  std::string method;
  std::string path;
  std::multimap<std::string, std::string> params;
  /// Regex capture groups of the matched route; [0] is the whole path.
  std::vector<std::string> matches;
  std::multimap<std::string, std::string> headers;
  std::string body;

  std::optional<std::string> param(const std::string& name) const;
  std::optional<std::string> header(const std::string& name) const;
};

struct Response {
  int status = 200;
  std::string content_type = "application/json";
  std::string body;

  static Response text(int status, std::string body) { return {status, "text/plain", std::move(body)}; }
  static Response json(int status, std::string body) { return {status, "application/json", std::move(body)}; }
};

/// Handlers may throw: ValidationError maps to 400, NotFoundError to 404,
/// ConflictError to 409, anything else to 500. Bodies are `{"error": ...}`.
using Handler = std::function<Response(const Request&)>;

/// Threaded HTTP server with regex routes. Permissive CORS headers are sent on
/// every response so browser dashboards can call the API directly.
class Server {
 public:
  Server();
  ~Server();
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  void get(const std::string& pattern, Handler handler);
  void post(const std::string& pattern, Handler handler);

  /// Binds the listening socket; `port` 0 picks a free port. Returns the bound
  /// port or throws aqnet::Error.
  int bind(const std::string& host, int port);
  /// Serves on a background thread. Requires a prior bind().
  void start();
  /// Serves on the calling thread until stop().
  void serve_blocking();
  void stop();
  int port() const noexcept;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

struct ClientResult {
  bool transport_ok = false;
  int status = 0;
  std::string body;
  std::string error;

  bool ok() const noexcept { return transport_ok && status >= 200 && status < 300; }
};

/// Blocking HTTP/1.1 client bound to one base URL (`http://host:port`).
/// Not safe for concurrent use; give each thread its own client.
class Client {
 public:
  explicit Client(const std::string& base_url, double timeout_seconds = 5.0);
  ~Client();
  Client(Client&&) noexcept;
  Client& operator=(Client&&) noexcept;

  ClientResult get(const std::string& path, const Params& params = {});
  ClientResult post(const std::string& path, const std::string& body,
                    const std::string& content_type = "application/json", const Params& headers = {});

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace aqnet::http
