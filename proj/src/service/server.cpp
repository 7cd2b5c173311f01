#include "aeroreact/service/server.hpp"

#include <httplib.h>

#include <atomic>

namespace aeroreact::service {

namespace {

constexpr auto kPollInterval = std::chrono::milliseconds(200);

void send_json(httplib::Response& res, int status, const Json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, int status, const std::string& message, Json extra = Json::object()) {
  Json body{{"error", message}};
  for (const auto& [k, v] : extra.items()) body[k] = v;
  send_json(res, status, body);
}

}  // namespace

struct Server::Impl {
  explicit Impl(SessionManager& s) : sessions(s) {}

  SessionManager& sessions;
  httplib::Server http;
  std::atomic<bool> stopping{false};

  // Runs `fn` with the session named by path match 1, mapping lookup errors.
  template <typename Fn>
  void with_session(const httplib::Request& req, httplib::Response& res, Fn&& fn) {
    try {
      fn(sessions.get(req.matches[1]));
    } catch (const SessionNotFound& e) {
      send_error(res, 404, e.what());
    } catch (const SessionBusy& e) {
      send_error(res, 409, e.what());
    } catch (const std::exception& e) {
      send_error(res, 500, e.what());
    }
  }

  void routes() {
    http.set_default_headers({{"Access-Control-Allow-Origin", "*"}});
    http.Options(R"(/.*)", [](const httplib::Request&, httplib::Response& res) {
      res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
      res.set_header("Access-Control-Allow-Headers", "Content-Type");
      res.status = 204;
    });

    http.Get("/health", [](const httplib::Request&, httplib::Response& res) { send_json(res, 200, {{"ok", true}}); });

    http.Get("/tools", [](const httplib::Request& req, httplib::Response& res) {
      const auto method = tools::parse_method(req.has_param("method") ? req.get_param_value("method") : "reacteval");
      if (!method) return send_error(res, 400, "unknown method");
      send_json(res, 200, tools::tool_schema_document(*method));
    });

    http.Post("/sessions", [this](const httplib::Request& req, httplib::Response& res) {
      Json body = req.body.empty() ? Json::object() : Json::parse(req.body, nullptr, false);
      if (body.is_discarded()) return send_error(res, 400, "request body is not JSON");
      try {
        const std::string id = sessions.create_from_json(body);
        auto s = sessions.get(id);
        send_json(res, 201, {{"session_id", id}, {"config", s->config().to_json()}, {"fleet", s->fleet()}});
      } catch (const ConfigError& e) {
        send_error(res, 400, "invalid config", {{"problems", e.problems()}});
      } catch (const std::exception& e) {
        send_error(res, 400, e.what());
      }
    });

    http.Get("/sessions", [this](const httplib::Request&, httplib::Response& res) {
      send_json(res, 200, {{"sessions", sessions.ids()}});
    });

    http.Get(R"(/sessions/([\w-]+))", [this](const httplib::Request& req, httplib::Response& res) {
      with_session(req, res, [&](const std::shared_ptr<Session>& s) { send_json(res, 200, s->summary()); });
    });

    http.Post(R"(/sessions/([\w-]+)/input)", [this](const httplib::Request& req, httplib::Response& res) {
      with_session(req, res, [&](const std::shared_ptr<Session>& s) {
        const Json body = Json::parse(req.body, nullptr, false);
        if (body.is_discarded() || !body.is_object() || !body.contains("text") || !body["text"].is_string() ||
            body["text"].get<std::string>().empty()) {
          return send_error(res, 400, "body must be {\"text\": \"...\"}");
        }
        const std::string run = s->submit(body["text"].get<std::string>());
        send_json(res, 202, {{"run_id", run}});
      });
    });

    http.Get(R"(/sessions/([\w-]+)/fleet)", [this](const httplib::Request& req, httplib::Response& res) {
      with_session(req, res, [&](const std::shared_ptr<Session>& s) { send_json(res, 200, s->fleet()); });
    });

    http.Get(R"(/sessions/([\w-]+)/transcripts/([\w-]+))",
             [this](const httplib::Request& req, httplib::Response& res) {
               with_session(req, res, [&](const std::shared_ptr<Session>& s) {
                 const auto run = s->transcript(req.matches[2]);
                 if (!run) return send_error(res, 404, "run not found: " + std::string(req.matches[2]));
                 send_json(res, 200, *run);
               });
             });

    http.Get(R"(/sessions/([\w-]+)/events)", [this](const httplib::Request& req, httplib::Response& res) {
      with_session(req, res, [&](const std::shared_ptr<Session>& s) {
        std::int64_t from = 0;
        if (req.has_param("from")) {
          try {
            from = std::stoll(req.get_param_value("from"));
          } catch (const std::exception&) {
            return send_error(res, 400, "from must be an integer");
          }
        } else if (req.has_header("Last-Event-ID")) {
          from = std::stoll(req.get_header_value("Last-Event-ID")) + 1;
        }
        const bool follow = !req.has_param("follow") || req.get_param_value("follow") != "0";
        res.set_header("Cache-Control", "no-cache");
        if (!follow) {
          std::string body;
          for (const auto& e : s->events().since(from)) body += e.to_sse();
          res.set_content(body, "text/event-stream");
          return;
        }
        auto next = std::make_shared<std::int64_t>(std::max<std::int64_t>(from, 1));
        res.set_chunked_content_provider(
            "text/event-stream", [this, s, next](size_t, httplib::DataSink& sink) {
              if (stopping) {
                sink.done();
                return true;
              }
              for (const auto& e : s->events().wait_since(*next, kPollInterval)) {
                const std::string chunk = e.to_sse();
                if (!sink.write(chunk.data(), chunk.size())) return false;
                *next = e.sequence + 1;
              }
              if (!sink.is_writable()) return false;
              return true;
            });
      });
    });
  }
};

Server::Server(SessionManager& sessions) : impl_(std::make_unique<Impl>(sessions)) {
  impl_->http.new_task_queue = [] { return new httplib::ThreadPool(32); };
  impl_->routes();
}

Server::~Server() { stop(); }

int Server::bind(const std::string& host, int port) {
  if (port == 0) return impl_->http.bind_to_any_port(host);
  return impl_->http.bind_to_port(host, port) ? port : -1;
}

bool Server::listen() { return impl_->http.listen_after_bind(); }

void Server::stop() {
  impl_->stopping = true;
  if (impl_->http.is_running()) impl_->http.stop();
}

bool Server::running() const { return impl_->http.is_running(); }

}  // namespace aeroreact::service
