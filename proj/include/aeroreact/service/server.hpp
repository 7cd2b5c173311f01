#pragma once

#include "aeroreact/service/session.hpp"

#include <memory>
#include <string>

namespace aeroreact::service {

/// HTTP front end over a SessionManager.
///
///   POST /sessions                         body: partial SessionConfig
///   GET  /sessions
///   GET  /sessions/{id}
///   POST /sessions/{id}/input              body: {"text": "..."}; 409 while busy
///   GET  /sessions/{id}/events?from=N      text/event-stream; follow=0 ends after the backlog
///   GET  /sessions/{id}/fleet
///   GET  /sessions/{id}/transcripts/{run}
///   GET  /tools?method=reacteval
///   GET  /health
class Server {
 public:
  explicit Server(SessionManager& sessions);
  ~Server();

  /// Binds; port 0 picks a free port. Returns the bound port, or -1.
  int bind(const std::string& host, int port);
  /// Blocks serving requests until stop().
  bool listen();
  void stop();
  bool running() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace aeroreact::service
