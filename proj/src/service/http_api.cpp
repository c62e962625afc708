#include "sigc/service/http_api.hpp"

#include <sys/socket.h>
#include <unistd.h>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "httplib.h"
#include "sigc/common/errors.hpp"

namespace sigc::service {

namespace {

using nlohmann::json;

constexpr const char* kJson = "application/json";

struct UnsupportedMediaType {
  std::string type;
};

void send(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), kJson);
}

void send_error(httplib::Response& res, int status, const std::string& message,
                const std::vector<std::string>& issues = {}) {
  json body{{"error", message}};
  if (!issues.empty()) body["issues"] = issues;
  send(res, status, body);
}

json parse_body(const httplib::Request& req) {
  if (req.has_header("Content-Type")) {
    const auto type = req.get_header_value("Content-Type");
    if (type.rfind(kJson, 0) != 0) throw UnsupportedMediaType{type};
  }
  if (req.body.empty()) return json::object();
  try {
    return json::parse(req.body);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("request body is not valid JSON: ") + e.what());
  }
}

std::string body_string(const json& body, const char* key) {
  auto it = body.find(key);
  if (it == body.end() || !it->is_string()) throw ValidationError(std::string("'") + key + "' is required");
  return it->get<std::string>();
}

// Runs a handler, mapping library errors to status codes.
template <class F>
httplib::Server::Handler guarded(F f) {
  return [f](const httplib::Request& req, httplib::Response& res) {
    try {
      f(req, res);
    } catch (const UnsupportedMediaType& e) {
      send_error(res, 415, "unsupported content type '" + e.type + "', use application/json");
    } catch (const NotFoundError& e) {
      send_error(res, 404, e.what());
    } catch (const ConflictError& e) {
      send_error(res, 409, e.what());
    } catch (const ValidationError& e) {
      send_error(res, 422, e.what(), e.issues());
    } catch (const std::exception& e) {
      send_error(res, 500, e.what());
    }
  };
}

}  // namespace

struct HttpServer::Impl {
  Service& service;
  httplib::Server server;
  int port = -1;
  // httplib only releases the listening socket from a running server, so a
  // bound-but-never-served socket is closed here.
  socket_t bound_sock = INVALID_SOCKET;
  std::atomic<bool> served{false};

  explicit Impl(Service& s) : service(s) {
    // The library default (SO_REUSEPORT) would let a second server share a
    // busy port.
    server.set_socket_options([this](socket_t sock) {
      int yes = 1;
      setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof yes);
      bound_sock = sock;
    });
    routes();
  }

  void routes() {
    server.Get("/healthz", guarded([this](const httplib::Request&, httplib::Response& res) {
      send(res, 200, {{"status", "ok"}, {"events", service.last_seq()}});
    }));

    server.Post("/v1/campaigns", guarded([this](const httplib::Request& req, httplib::Response& res) {
      const json body = parse_body(req);
      if (body.contains("manifest_path")) {
        send(res, 201, service.create_campaign(body_string(body, "manifest_path")));
      } else {
        send(res, 201, service.create_campaign(body, std::filesystem::current_path().string()));
      }
    }));

    server.Get(R"(/v1/campaigns/([^/]+))", guarded([this](const httplib::Request& req, httplib::Response& res) {
      send(res, 200, service.campaign_summary(req.matches[1]));
    }));

    server.Post(R"(/v1/campaigns/([^/]+)/(open|close))",
                guarded([this](const httplib::Request& req, httplib::Response& res) {
                  parse_body(req);
                  const std::string id = req.matches[1];
                  send(res, 200, req.matches[2] == "open" ? service.open_campaign(id) : service.close_campaign(id));
                }));

    server.Post(R"(/v1/campaigns/([^/]+)/sessions)",
                guarded([this](const httplib::Request& req, httplib::Response& res) {
                  const json body = parse_body(req);
                  json out = service.create_session(req.matches[1], body_string(body, "participant_id"));
                  send(res, out.value("resumed", false) ? 200 : 201, out);
                }));

    server.Get(R"(/v1/sessions/([^/]+)/task)", guarded([this](const httplib::Request& req, httplib::Response& res) {
      send(res, 200, service.next_task(req.matches[1]));
    }));

    server.Post(R"(/v1/sessions/([^/]+)/playback-complete)",
                guarded([this](const httplib::Request& req, httplib::Response& res) {
                  const json body = parse_body(req);
                  send(res, 200, service.playback_complete(req.matches[1], body_string(body, "task_id"),
                                                           body_string(body, "clip_ref")));
                }));

    server.Post(R"(/v1/sessions/([^/]+)/answers)",
                guarded([this](const httplib::Request& req, httplib::Response& res) {
                  const json body = parse_body(req);
                  send(res, 200, service.submit_answers(req.matches[1],
                                                        req.get_header_value("Idempotency-Key"), body));
                }));

    server.Get(R"(/v1/campaigns/([^/]+)/results)",
               guarded([this](const httplib::Request& req, httplib::Response& res) {
                 const auto level = analytics::level_from_string(
                     req.has_param("level") ? req.get_param_value("level") : "clip");
                 const std::string partial_param = req.get_param_value("partial");
                 const bool partial = partial_param == "1" || partial_param == "true";
                 if (req.get_param_value("format") == "csv") {
                   res.status = 200;
                   res.set_content(service.results_csv(req.matches[1], level, partial), "text/csv");
                 } else {
                   send(res, 200, service.results_document(req.matches[1], level, partial));
                 }
               }));

    server.Get(R"(/v1/media/([^/]+)/(.+))", guarded([this](const httplib::Request& req, httplib::Response& res) {
      const std::string path = service.media_file(req.matches[1], req.matches[2]);
      std::ifstream in(path, std::ios::binary);
      if (!in) throw NotFoundError("media file unavailable");
      std::ostringstream ss;
      ss << in.rdbuf();
      res.set_header("Accept-Ranges", "bytes");
      res.set_content(ss.str(), "audio/wav");
    }));
  }
};

HttpServer::HttpServer(Service& service) : impl_(std::make_unique<Impl>(service)) {}
HttpServer::~HttpServer() {
  if (!impl_->served && impl_->bound_sock != INVALID_SOCKET && impl_->port > 0) ::close(impl_->bound_sock);
}

bool HttpServer::bind(const std::string& host, int port) {
  if (port == 0) {
    impl_->port = impl_->server.bind_to_any_port(host);
    return impl_->port > 0;
  }
  if (!impl_->server.bind_to_port(host, port)) return false;
  impl_->port = port;
  return true;
}

int HttpServer::port() const { return impl_->port; }
bool HttpServer::serve() {
  impl_->served = true;
  return impl_->server.listen_after_bind();
}
void HttpServer::stop() { impl_->server.stop(); }
void HttpServer::wait_until_ready() const { impl_->server.wait_until_ready(); }

}  // namespace sigc::service
