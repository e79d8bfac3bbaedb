#include "aqnet/http/http.hpp"

#include <httplib.h>

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <json.hpp>
#include <thread>

#include "aqnet/core/errors.hpp"

namespace aqnet::http {

std::optional<std::string> Request::param(const std::string& name) const {
  const auto it = params.find(name);
  if (it == params.end()) return std::nullopt;
  return it->second;
}

std::optional<std::string> Request::header(const std::string& name) const {
  for (const auto& [k, v] : headers) {
    if (k.size() == name.size() &&
        std::equal(k.begin(), k.end(), name.begin(), [](char a, char b) { return std::tolower(a) == std::tolower(b); })) {
      return v;
    }
  }
  return std::nullopt;
}

namespace {

std::string error_body(const std::string& message, const std::map<std::string, std::string>& fields = {}) {
  nlohmann::json j{{"error", message}};
  if (!fields.empty()) j["fields"] = fields;
  return j.dump();
}

httplib::Server::Handler adapt(Handler handler) {
  return [handler = std::move(handler)](const httplib::Request& req, httplib::Response& res) {
    Request r;
    r.method = req.method;
    r.path = req.path;
    r.params.insert(req.params.begin(), req.params.end());
    for (const auto& m : req.matches) r.matches.emplace_back(m.str());
    r.headers.insert(req.headers.begin(), req.headers.end());
    r.body = req.body;

    Response out;
    try {
      out = handler(r);
    } catch (const ValidationError& e) {
      out = Response::json(400, error_body(e.what(), e.fields()));
    } catch (const NotFoundError& e) {
      out = Response::json(404, error_body(e.what()));
    } catch (const ConflictError& e) {
      out = Response::json(409, error_body(e.what()));
    } catch (const std::exception& e) {
      out = Response::json(500, error_body(e.what()));
    }
    res.status = out.status;
    res.set_content(out.body, out.content_type);
  };
}

}  // namespace

struct Server::Impl {
  httplib::Server server;
  std::thread thread;
  int port = 0;
  bool bound = false;
};

Server::Server() : impl_(std::make_unique<Impl>()) {
  impl_->server.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                                     {"Access-Control-Allow-Headers", "Content-Type, X-Admin-Key"},
                                     {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"}});
  impl_->server.Options(R"(.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });
  impl_->server.set_keep_alive_max_count(1000);
  impl_->server.set_tcp_nodelay(true);
  // SO_REUSEADDR only: a second server on a live port must fail to bind.
  impl_->server.set_socket_options([](auto sock) {
    int yes = 1;
    setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof(yes));
  });
}

Server::~Server() { stop(); }

void Server::get(const std::string& pattern, Handler handler) { impl_->server.Get(pattern, adapt(std::move(handler))); }

void Server::post(const std::string& pattern, Handler handler) {
  impl_->server.Post(pattern, adapt(std::move(handler)));
}

int Server::bind(const std::string& host, int port) {
  if (port == 0) {
    const int p = impl_->server.bind_to_any_port(host);
    if (p < 0) throw Error("cannot bind " + host + " on any port");
    impl_->port = p;
  } else {
    if (!impl_->server.bind_to_port(host, port)) {
      throw Error("cannot bind " + host + ":" + std::to_string(port) + " (port in use or not permitted)");
    }
    impl_->port = port;
  }
  impl_->bound = true;
  return impl_->port;
}

void Server::start() {
  if (!impl_->bound) throw Error("http server started before bind");
  impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
}

void Server::serve_blocking() {
  if (!impl_->bound) throw Error("http server started before bind");
  impl_->server.listen_after_bind();
}

void Server::stop() {
  if (!impl_) return;
  impl_->server.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

int Server::port() const noexcept { return impl_->port; }

struct Client::Impl {
  explicit Impl(const std::string& url) : client(url) {}
  httplib::Client client;
};

Client::Client(const std::string& base_url, double timeout_seconds) : impl_(std::make_unique<Impl>(base_url)) {
  const auto secs = static_cast<time_t>(timeout_seconds);
  const auto usecs = static_cast<time_t>((timeout_seconds - std::floor(timeout_seconds)) * 1e6);
  impl_->client.set_connection_timeout(secs, usecs);
  impl_->client.set_read_timeout(secs, usecs);
  impl_->client.set_write_timeout(secs, usecs);
  impl_->client.set_keep_alive(true);
  impl_->client.set_tcp_nodelay(true);
}

Client::~Client() = default;
Client::Client(Client&&) noexcept = default;
Client& Client::operator=(Client&&) noexcept = default;

namespace {
ClientResult convert(const httplib::Result& res) {
  ClientResult out;
  if (!res) {
    out.error = httplib::to_string(res.error());
    return out;
  }
  out.transport_ok = true;
  out.status = res->status;
  out.body = res->body;
  return out;
}
}  // namespace

ClientResult Client::get(const std::string& path, const Params& params) {
  httplib::Params p(params.begin(), params.end());
  return convert(impl_->client.Get(path, p, httplib::Headers{}));
}

ClientResult Client::post(const std::string& path, const std::string& body, const std::string& content_type,
                          const Params& headers) {
  httplib::Headers h(headers.begin(), headers.end());
  return convert(impl_->client.Post(path, h, body, content_type));
}

}  // namespace aqnet::http
