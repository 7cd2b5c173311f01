#include "aeroreact/service/server.hpp"

#include <doctest.h>
#include <httplib.h>

#include <atomic>
#include <fstream>
#include <sstream>
#include <thread>

using namespace aeroreact;
using namespace aeroreact::service;
namespace fs = std::filesystem;
using llm::TemplateId;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    static std::atomic<int> counter{0};
    path = fs::temp_directory_path() /
           ("aeroreact-session-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

// Every run: drone 1 takes off and moves forward 1 m, drone 2 stays idle.
fs::path write_script(const fs::path& dir, int runs) {
  llm::Script script;
  for (int k = 1; k <= runs; ++k) {
    const std::string head = "run-" + std::to_string(k) + "/head";
    const std::string d1 = "run-" + std::to_string(k) + "/drone-1";
    script.add({head, TemplateId::plan, 1,
                R"({"1": {"plan": "take off if needed, move forward 1 m", "expected_outcome": "moved", "end_flag": false},)"
                R"( "2": {"plan": "none", "expected_outcome": "idle", "end_flag": true}, "response_to_user": ""})"});
    const char* first = k == 1 ? "takeoff" : "move";
    script.add({d1, TemplateId::reason, 1, std::string(R"({"reasoning": "r", "intended_action": ")") + first + "\"}"});
    script.add({d1, TemplateId::act, 1,
                k == 1 ? R"({"function_call": "takeoff", "parameters": {}})"
                       : R"({"function_call": "move", "parameters": {"direction": "forward", "distance": 1}})"});
    script.add({d1, TemplateId::evaluate, 1,
                std::string(R"({"evaluation_summary": "ok", "end_flag": )") + (k == 1 ? "false" : "true") +
                    R"(, "next_steps_notes": ""})"});
    if (k == 1) {
      script.add({d1, TemplateId::reason, 2, R"({"reasoning": "r", "intended_action": "move"})"});
      script.add({d1, TemplateId::act, 2,
                  R"({"function_call": "move", "parameters": {"direction": "forward", "distance": 1}})"});
      script.add({d1, TemplateId::evaluate, 2, R"({"evaluation_summary": "ok", "end_flag": true, "next_steps_notes": ""})"});
    }
    script.add({head, TemplateId::respond, 1, "{\"response\": \"Run " + std::to_string(k) + " done.\"}"});
  }
  const fs::path path = dir / "script.jsonl";
  std::ofstream out(path);
  script.write_jsonl(out);
  return path;
}

SessionConfig scripted_config(const fs::path& script) {
  SessionConfig c;
  c.backend = llm::BackendConfig::from_spec("scripted:" + script.string());
  return c;
}

std::vector<SessionEvent> parse_sse(const std::string& body) {
  std::vector<SessionEvent> out;
  std::istringstream in(body);
  std::string line;
  SessionEvent e;
  std::string kind;
  while (std::getline(in, line)) {
    if (line.rfind("id: ", 0) == 0) e.sequence = std::stoll(line.substr(4));
    if (line.rfind("event: ", 0) == 0) kind = line.substr(7);
    if (line.rfind("data: ", 0) == 0) {
      e = SessionEvent::from_json(Json::parse(line.substr(6)));
      CHECK(std::string(to_string(e.kind)) == kind);
    }
    if (line.empty() && e.sequence > 0) {
      out.push_back(e);
      e = {};
    }
  }
  return out;
}

void check_gap_free(const std::vector<SessionEvent>& events, std::int64_t first = 1) {
  for (size_t i = 0; i < events.size(); ++i) CHECK(events[i].sequence == first + static_cast<std::int64_t>(i));
}

// Chat-completions stand-in that answers by prompt role and can be held.
struct MockModel {
  httplib::Server server;
  std::thread thread;
  std::atomic<bool> hold{false};
  int port = 0;

  MockModel() {
    server.Post("/v1/chat/completions", [this](const httplib::Request& req, httplib::Response& res) {
      while (hold) std::this_thread::sleep_for(std::chrono::milliseconds(5));
      const std::string prompt = Json::parse(req.body)["messages"][0]["content"].get<std::string>();
      std::string content;
      if (prompt.find("Multi-Drone Task Planning") != std::string::npos) {
        content = R"({"1": {"plan": "take off", "expected_outcome": "airborne", "end_flag": false}, "response_to_user": ""})";
      } else if (prompt.find("Task Reasoning") != std::string::npos) {
        content = R"({"reasoning": "r", "intended_action": "takeoff"})";
      } else if (prompt.find("Action Formulation") != std::string::npos) {
        content = R"({"function_call": "takeoff", "parameters": {}})";
      } else if (prompt.find("Evaluation") != std::string::npos) {
        content = R"({"evaluation_summary": "ok", "end_flag": true, "next_steps_notes": ""})";
      } else {
        content = R"({"response": "Drone 1 is airborne."})";
      }
      res.set_content(Json{{"choices", {{{"message", {{"content", content}}}}}}}.dump(), "application/json");
    });
    port = server.bind_to_any_port("127.0.0.1");
    thread = std::thread([this] { server.listen_after_bind(); });
    server.wait_until_ready();
  }
  ~MockModel() {
    hold = false;
    server.stop();
    thread.join();
  }
  std::string spec() const { return "http:mock@http://127.0.0.1:" + std::to_string(port); }
};

struct LiveServer {
  Server server;
  std::thread thread;
  int port;
  explicit LiveServer(SessionManager& m) : server(m) {
    port = server.bind("127.0.0.1", 0);
    REQUIRE(port > 0);
    thread = std::thread([this] { server.listen(); });
    while (!server.running()) std::this_thread::sleep_for(std::chrono::milliseconds(1));
  }
  ~LiveServer() {
    server.stop();
    thread.join();
  }
  httplib::Client client() const {
    httplib::Client c("127.0.0.1", port);
    c.set_read_timeout(10);
    return c;
  }
};

}  // namespace

TEST_CASE("session config defaults and validation") {
  const SessionConfig d;
  CHECK(d.n_drones == 2);
  CHECK(d.spacing == 2.0);
  CHECK(d.method == tools::Method::reacteval);
  CHECK(d.max_iters == 20);

  const auto c = SessionConfig::from_json(Json::parse(R"({"n_drones": 5, "method": "act", "backend": "scripted:/x"})"));
  CHECK(c.n_drones == 5);
  CHECK(c.method == tools::Method::act);
  CHECK(c.spacing == 2.0);

  auto problems_of = [](const char* text) {
    try {
      SessionConfig::from_json(Json::parse(text));
    } catch (const ConfigError& e) {
      return e.problems();
    }
    return std::vector<std::string>{};
  };
  auto mentions = [](const std::vector<std::string>& ps, const std::string& field) {
    return std::any_of(ps.begin(), ps.end(), [&](const std::string& p) { return p.rfind(field, 0) == 0; });
  };
  CHECK(mentions(problems_of(R"({"n_drones": 0, "backend": "scripted:/x"})"), "n_drones"));
  CHECK(mentions(problems_of(R"({"n_drones": "two", "backend": "scripted:/x"})"), "n_drones"));
  CHECK(mentions(problems_of(R"({"n_drones": 1.5, "backend": "scripted:/x"})"), "n_drones"));
  CHECK(mentions(problems_of(R"({"spacing": -1, "backend": "scripted:/x"})"), "spacing"));
  CHECK(mentions(problems_of(R"({"method": "fly", "backend": "scripted:/x"})"), "method"));
  CHECK(mentions(problems_of(R"({"max_iters": 0, "backend": "scripted:/x"})"), "max_iters"));
  CHECK(mentions(problems_of(R"({"backend": "scripted:/x", "scene_path": "/nonexistent/scene.json"})"), "scene_path"));
  CHECK_FALSE(problems_of(R"({})").empty());
  const auto several = problems_of(R"({"n_drones": 0, "spacing": 0, "backend": "scripted:/x"})");
  CHECK(several.size() >= 2);
}

TEST_CASE("service config layouts and relative paths") {
  TempDir tmp;
  fs::create_directories(tmp.path / "conf");
  std::ofstream(tmp.path / "conf" / "scene.json") << R"({"objects": []})";
  std::ofstream(tmp.path / "conf" / "service.json")
      << R"({"port": 0, "data_dir": "data", "session": {"backend": "scripted:s.jsonl", "scene_path": "scene.json"}})";
  const auto c = ServiceConfig::load(tmp.path / "conf" / "service.json");
  CHECK(c.port == 0);
  CHECK(c.host == "127.0.0.1");
  CHECK(c.data_dir == tmp.path / "conf" / "data");
  CHECK(c.session.backend.script_path == tmp.path / "conf" / "s.jsonl");
  CHECK(c.session.scene_path == tmp.path / "conf" / "scene.json");

  const auto flat = ServiceConfig::from_json(Json::parse(R"({"n_drones": 3, "backend": "scripted:/x"})"));
  CHECK(flat.session.n_drones == 3);
  CHECK(flat.port == 8080);
}

TEST_CASE("sse framing") {
  EventLog log;
  const auto e = log.append(EventKind::reason, "run-1", {{"drone_id", 1}});
  CHECK(e.sequence == 1);
  CHECK(e.to_sse() == "id: 1\nevent: reason\ndata: " + e.to_json().dump() + "\n\n");
  CHECK(SessionEvent::from_json(e.to_json()).to_json() == e.to_json());
  CHECK(log.append(EventKind::action, "run-1", {}).sequence == 2);
  CHECK(log.since(2).size() == 1);
  CHECK(log.since(0).size() == 2);
  CHECK(log.wait_since(3, std::chrono::milliseconds(20)).empty());
  std::thread t([&] {
    std::this_thread::sleep_for(std::chrono::milliseconds(20));
    log.append(EventKind::response, "run-1", {});
  });
  CHECK(log.wait_since(3, std::chrono::seconds(5)).size() == 1);
  t.join();
  for (int k = 0; k <= static_cast<int>(EventKind::error); ++k) {
    const auto kind = static_cast<EventKind>(k);
    CHECK(parse_event_kind(to_string(kind)) == kind);
  }
}

TEST_CASE("fleet size follows the config") {
  TempDir tmp;
  SessionConfig c = scripted_config(write_script(tmp.path, 1));
  c.n_drones = 5;
  SessionManager m(tmp.path, c);
  const auto s = m.get(m.create(c));
  const Json fleet = s->fleet();
  REQUIRE(fleet["drones"].size() == 5);
  for (int i = 0; i < 5; ++i) {
    CHECK(fleet["drones"][i]["id"] == i + 1);
    CHECK(fleet["drones"][i]["y"].get<double>() == 2.0 * i);
  }
}

TEST_CASE("a run emits a gap-free ordered event stream") {
  TempDir tmp;
  const SessionConfig c = scripted_config(write_script(tmp.path, 2));
  SessionManager m(tmp.path, c);
  const auto s = m.get(m.create(c));
  CHECK(s->run("Drone 1, take off and move forward 1 m.") == "run-1");
  const auto events = s->events().since(1);
  check_gap_free(events);
  REQUIRE(events.size() >= 4);
  CHECK(events.front().kind == EventKind::user_input);
  CHECK(events[1].kind == EventKind::head_plan);
  CHECK(events.back().kind == EventKind::response);
  CHECK(events.back().payload["response"] == "Run 1 done.");
  CHECK(events.back().payload["fallback"] == false);
  CHECK(events.back().payload.contains("entry"));

  std::vector<EventKind> kinds;
  for (const auto& e : events) {
    CHECK(e.run == "run-1");
    kinds.push_back(e.kind);
  }
  CHECK(kinds == std::vector<EventKind>{EventKind::user_input, EventKind::head_plan, EventKind::reason,
                                        EventKind::action, EventKind::state_update, EventKind::evaluation,
                                        EventKind::reason, EventKind::action, EventKind::state_update,
                                        EventKind::evaluation, EventKind::state_update, EventKind::response});
  CHECK(events[3].payload["step"] == 1);
  CHECK(events[7].payload["step"] == 2);

  // The last state update is the fleet the session reports.
  const auto last_state = std::find_if(events.rbegin(), events.rend(),
                                       [](const SessionEvent& e) { return e.kind == EventKind::state_update; });
  CHECK(last_state->payload == s->fleet());
  CHECK(s->fleet()["drones"][0]["y"] == 1.0);
  CHECK(s->fleet()["drones"][0]["is_flying"] == true);

  const auto transcript = s->transcript("run-1");
  REQUIRE(transcript);
  CHECK((*transcript)["response"] == "Run 1 done.");
  CHECK_FALSE(s->transcript("run-7"));
  CHECK_FALSE(s->transcript("../config"));

  CHECK(s->run("again") == "run-2");
  check_gap_free(s->events().since(1));
  CHECK(s->history_size() == 2);
  CHECK(s->fleet()["drones"][0]["y"] == 2.0);
}

TEST_CASE("a backend failure still ends with a response") {
  TempDir tmp;
  const SessionConfig c = scripted_config(write_script(tmp.path, 1));
  SessionManager m(tmp.path, c);
  const auto s = m.get(m.create(c));
  s->run("first");
  s->run("second has no script entries");
  const auto events = s->events().since(1);
  check_gap_free(events);
  CHECK(events.back().kind == EventKind::response);
  CHECK(events.back().payload["fallback"] == true);
  CHECK_FALSE(events.back().payload["response"].get<std::string>().empty());
  CHECK(std::any_of(events.begin(), events.end(), [](const SessionEvent& e) { return e.kind == EventKind::error; }));
  CHECK_FALSE(s->busy());
}

TEST_CASE("sessions persist and restore") {
  TempDir tmp;
  const SessionConfig c = scripted_config(write_script(tmp.path, 3));
  std::string id;
  Json fleet;
  std::int64_t last = 0;
  {
    SessionManager m(tmp.path, c);
    id = m.create(c);
    const auto s = m.get(id);
    s->run("one");
    s->run("two");
    fleet = s->fleet();
    last = s->events().last_sequence();
  }
  SessionManager again(tmp.path, c);
  CHECK(again.ids() == std::vector<std::string>{id});
  const auto s = again.get(id);
  CHECK(s->fleet() == fleet);
  CHECK(s->history_size() == 2);
  CHECK(s->history()[1].user_input == "two");
  CHECK(s->events().last_sequence() == last);
  CHECK(again.warnings().empty());

  // The next run continues numbering and the head sees the restored history.
  CHECK(s->run("three") == "run-3");
  const auto events = s->events().since(1);
  check_gap_free(events);
  CHECK(events[static_cast<size_t>(last)].kind == EventKind::user_input);
  CHECK(s->history_size() == 3);

  CHECK_THROWS_AS(again.get("s-missing"), SessionNotFound);
}

TEST_CASE("a truncated last line is dropped on restore") {
  TempDir tmp;
  const SessionConfig c = scripted_config(write_script(tmp.path, 1));
  std::string id;
  std::int64_t last = 0;
  {
    SessionManager m(tmp.path, c);
    id = m.create(c);
    const auto s = m.get(id);
    s->run("one");
    last = s->events().last_sequence();
  }
  const fs::path log = tmp.path / "sessions" / id / "events.jsonl";
  REQUIRE(fs::exists(log));
  std::ofstream(log, std::ios::app) << R"({"sequence": )" << last + 1 << R"(, "kind": "reas)";

  SessionManager m(tmp.path, c);
  const auto s = m.get(id);
  CHECK(s->events().last_sequence() == last);
  CHECK(m.warnings().size() == 1);
  CHECK(s->history_size() == 1);
  // The file was rewritten from the valid prefix.
  const auto reloaded = EventLog::load(log);
  CHECK_FALSE(reloaded.warning);
  CHECK(static_cast<std::int64_t>(reloaded.events.size()) == last);
}

TEST_CASE("an empty event log restores a fresh session") {
  TempDir tmp;
  const SessionConfig c = scripted_config(write_script(tmp.path, 1));
  std::string id;
  Json initial;
  {
    SessionManager m(tmp.path, c);
    id = m.create(c);
    initial = m.get(id)->fleet();
  }
  std::ofstream(tmp.path / "sessions" / id / "events.jsonl", std::ios::trunc);
  SessionManager m(tmp.path, c);
  const auto s = m.get(id);
  CHECK(s->fleet() == initial);
  CHECK(s->history_size() == 0);
  CHECK(s->events().last_sequence() == 0);
  CHECK(s->run("one") == "run-1");
}

TEST_CASE("http api round trip") {
  TempDir tmp;
  const SessionConfig c = scripted_config(write_script(tmp.path, 2));
  SessionManager m(tmp.path, c);
  LiveServer live(m);
  auto cli = live.client();

  auto res = cli.Get("/health");
  REQUIRE(res);
  CHECK(res->status == 200);
  res = cli.Get("/tools?method=act");
  REQUIRE(res);
  CHECK(Json::parse(res->body)["tools"].size() == 9);
  CHECK(cli.Get("/tools?method=fly")->status == 400);

  res = cli.Post("/sessions", R"({"n_drones": 0})", "application/json");
  REQUIRE(res);
  CHECK(res->status == 400);
  CHECK_FALSE(Json::parse(res->body)["problems"].empty());
  CHECK(cli.Post("/sessions", "not json", "application/json")->status == 400);

  res = cli.Post("/sessions", R"({"n_drones": 3})", "application/json");
  REQUIRE(res);
  REQUIRE(res->status == 201);
  const Json created = Json::parse(res->body);
  const std::string id = created["session_id"];
  CHECK(created["fleet"]["drones"].size() == 3);
  CHECK(created["config"]["n_drones"] == 3);
  CHECK(Json::parse(cli.Get("/sessions")->body)["sessions"] == Json::array({id}));

  CHECK(cli.Get("/sessions/nope")->status == 404);
  CHECK(cli.Get("/sessions/nope/events?follow=0")->status == 404);
  CHECK(cli.Post("/sessions/nope/input", R"({"text": "x"})", "application/json")->status == 404);
  CHECK(cli.Post("/sessions/" + id + "/input", R"({"txt": "x"})", "application/json")->status == 400);
  CHECK(cli.Post("/sessions/" + id + "/input", R"({"text": ""})", "application/json")->status == 400);

  res = cli.Post("/sessions/" + id + "/input", R"({"text": "Drone 1, take off and move forward 1 m."})",
                 "application/json");
  REQUIRE(res);
  CHECK(res->status == 202);
  CHECK(Json::parse(res->body)["run_id"] == "run-1");
  m.get(id)->wait_idle();

  res = cli.Get("/sessions/" + id + "/events?follow=0");
  REQUIRE(res);
  CHECK(res->get_header_value("Content-Type").rfind("text/event-stream", 0) == 0);
  const auto events = parse_sse(res->body);
  check_gap_free(events);
  REQUIRE_FALSE(events.empty());
  CHECK(events.back().kind == EventKind::response);

  const auto tail = parse_sse(cli.Get("/sessions/" + id + "/events?follow=0&from=5")->body);
  REQUIRE_FALSE(tail.empty());
  CHECK(tail.front().sequence == 5);
  CHECK(tail.size() == events.size() - 4);
  const auto resumed = parse_sse(cli.Get("/sessions/" + id + "/events?follow=0", {{"Last-Event-ID", "6"}})->body);
  REQUIRE_FALSE(resumed.empty());
  CHECK(resumed.front().sequence == 7);
  CHECK(cli.Get("/sessions/" + id + "/events?from=x")->status == 400);

  const Json fleet = Json::parse(cli.Get("/sessions/" + id + "/fleet")->body);
  CHECK(fleet == m.get(id)->fleet());
  CHECK(fleet["drones"][0]["y"] == 1.0);
  const Json summary = Json::parse(cli.Get("/sessions/" + id)->body);
  CHECK(summary["runs"] == 1);
  CHECK(summary["busy"] == false);
  CHECK(summary["last_sequence"] == events.back().sequence);

  res = cli.Get("/sessions/" + id + "/transcripts/run-1");
  REQUIRE(res);
  CHECK(res->status == 200);
  CHECK(Json::parse(res->body)["run"] == "run-1");
  CHECK(cli.Get("/sessions/" + id + "/transcripts/run-9")->status == 404);

  // A live follower from the current end sees the whole next run.
  const std::int64_t next = events.back().sequence + 1;
  std::string streamed;
  std::thread follower([&] {
    auto fc = live.client();
    fc.Get("/sessions/" + id + "/events?from=" + std::to_string(next), [&](const char* data, size_t n) {
      streamed.append(data, n);
      // Stop once the response event has been received in full.
      const auto at = streamed.find("event: response");
      return at == std::string::npos || streamed.find("\n\n", at) == std::string::npos;
    });
  });
  std::this_thread::sleep_for(std::chrono::milliseconds(100));
  CHECK(cli.Post("/sessions/" + id + "/input", R"({"text": "again"})", "application/json")->status == 202);
  follower.join();
  const auto live_events = parse_sse(streamed);
  REQUIRE_FALSE(live_events.empty());
  check_gap_free(live_events, next);
  CHECK(live_events.front().kind == EventKind::user_input);
  CHECK(live_events.back().kind == EventKind::response);
  CHECK(live_events.back().run == "run-2");
  m.get(id)->wait_idle();
}

TEST_CASE("input while a run is active is rejected with 409") {
  TempDir tmp;
  MockModel model;
  SessionConfig c;
  c.backend = llm::BackendConfig::from_spec(model.spec());
  SessionManager m(tmp.path, c);
  LiveServer live(m);
  auto cli = live.client();
  const std::string id = Json::parse(cli.Post("/sessions", "{}", "application/json")->body)["session_id"];

  model.hold = true;
  CHECK(cli.Post("/sessions/" + id + "/input", R"({"text": "take off"})", "application/json")->status == 202);
  CHECK(m.get(id)->busy());
  auto res = cli.Post("/sessions/" + id + "/input", R"({"text": "land"})", "application/json");
  REQUIRE(res);
  CHECK(res->status == 409);
  CHECK_THROWS_AS(m.get(id)->run("land"), SessionBusy);
  model.hold = false;
  m.get(id)->wait_idle();

  const auto events = m.get(id)->events().since(1);
  check_gap_free(events);
  CHECK(events.back().payload["response"] == "Drone 1 is airborne.");
  CHECK(m.get(id)->fleet()["drones"][0]["is_flying"] == true);
  CHECK(cli.Post("/sessions/" + id + "/input", R"({"text": "again"})", "application/json")->status == 202);
  m.get(id)->wait_idle();
}
