#pragma once

#include <memory>
#include <string>

#include "sigc/service/service.hpp"

namespace sigc::service {

// JSON over HTTP in front of a Service:
//   POST /v1/campaigns                      manifest document or {"manifest_path"}
//   GET  /v1/campaigns/{id}
//   POST /v1/campaigns/{id}/open | /close
//   POST /v1/campaigns/{id}/sessions        {"participant_id"}
//   GET  /v1/sessions/{id}/task
//   POST /v1/sessions/{id}/playback-complete {"task_id", "clip_ref"}
//   POST /v1/sessions/{id}/answers          Idempotency-Key header
//   GET  /v1/campaigns/{id}/results?level=clip|model[&partial=1][&format=csv]
//   GET  /v1/media/{campaign}/{ref}         audio/wav, byte ranges honoured
//   GET  /healthz
// Errors: 404 unknown ids, 409 conflicts and stale tasks, 415 non-JSON
// bodies, 422 validation, 500 otherwise.
class HttpServer {
 public:
  explicit HttpServer(Service& service);
  ~HttpServer();

  // Returns false when the port is taken. Port 0 picks a free one.
  bool bind(const std::string& host, int port);
  int port() const;
  // Blocks until stop().
  bool serve();
  void stop();
  void wait_until_ready() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace sigc::service
