#include "aeroreact/service/session.hpp"

#include <algorithm>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

namespace aeroreact::service {

namespace {

bool valid_id(const std::string& id) {
  return !id.empty() && id.size() <= 64 && std::all_of(id.begin(), id.end(), [](unsigned char c) {
    return std::isalnum(c) || c == '-' || c == '_';
  });
}

std::string random_id() {
  static std::mutex mu;
  static std::mt19937_64 rng{std::random_device{}()};
  std::lock_guard lock(mu);
  std::ostringstream os;
  os << "s" << std::hex << (rng() & 0xffffffffULL);
  return os.str();
}

void write_json(const std::filesystem::path& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

}  // namespace

/// Turns agent callbacks into session events.
class Session::Recorder final : public agents::AgentObserver {
 public:
  Recorder(Session& s, std::string run) : s_(s), run_(std::move(run)) {}

  void on_head_plan(const agents::PlanOutcome& plan) override { emit(EventKind::head_plan, plan.to_json()); }

  void on_reason(int drone_id, const Json& reasoning) override {
    if (s_.config_.method != tools::Method::act) ++steps_[drone_id];
    emit(EventKind::reason, {{"drone_id", drone_id}, {"step", steps_[drone_id]}, {"reasoning", reasoning}});
  }

  void on_action(int drone_id, const agents::ActionRecord& record) override {
    if (s_.config_.method == tools::Method::act) ++steps_[drone_id];
    emit(EventKind::action, {{"drone_id", drone_id}, {"step", steps_[drone_id]}, {"action", record.to_json()}});
    Json snapshot = s_.fleet_->snapshot();
    {
      std::lock_guard lock(s_.mu_);
      s_.fleet_snapshot_ = snapshot;
    }
    emit(EventKind::state_update, std::move(snapshot));
  }

  void on_evaluation(int drone_id, const Json& evaluation) override {
    emit(EventKind::evaluation, {{"drone_id", drone_id}, {"step", steps_[drone_id]}, {"evaluation", evaluation}});
  }

  void on_error(std::optional<int> drone_id, const std::string& message) override {
    Json payload{{"drone_id", drone_id ? Json(*drone_id) : Json()}, {"message", message}};
    emit(EventKind::error, std::move(payload));
  }

 private:
  void emit(EventKind kind, Json payload) { s_.events_->append(kind, run_, std::move(payload)); }

  Session& s_;
  std::string run_;
  std::map<int, int> steps_;
};

Session::Session(std::string id, SessionConfig config, std::filesystem::path dir)
    : Session(std::move(id), std::move(config), std::move(dir), {}, Restored{}) {}

Session::Session(std::string id, SessionConfig config, std::filesystem::path dir, std::vector<SessionEvent> events,
                 Restored)
    : id_(std::move(id)), config_(std::move(config)), dir_(std::move(dir)) {
  std::filesystem::create_directories(dir_ / "runs");
  write_json(dir_ / "config.json", config_.to_json());

  if (!config_.scene_path.empty()) scene_ = tools::Scene::load(config_.scene_path);
  backend_ = llm::make_backend(config_.backend);
  vision_ = std::make_unique<tools::ScriptedVision>(scene_);

  // Replay: last state_update is the fleet, response events carry history.
  const Json* last_state = nullptr;
  std::vector<agents::SessionEntry> entries;
  for (const auto& e : events) {
    if (e.kind == EventKind::state_update) last_state = &e.payload;
    if (e.kind == EventKind::user_input) ++runs_;
    if (e.kind == EventKind::response && e.payload.contains("entry")) {
      entries.push_back(agents::SessionEntry::from_json(e.payload["entry"]));
    }
  }
  fleet_ = last_state ? std::make_unique<sim::Fleet>(sim::Fleet::from_snapshot(*last_state))
                      : std::make_unique<sim::Fleet>(config_.n_drones, config_.spacing);
  fleet_snapshot_ = fleet_->snapshot();

  world_ = std::make_unique<tools::World>(tools::World{*fleet_, scene_, *vision_, captures_});
  agents::AgentOptions options;
  options.max_iters = config_.max_iters;
  options.max_retries = config_.backend.max_retries;
  head_ = std::make_unique<agents::HeadAgent>(*backend_, *world_, options);
  history_ = entries;
  for (auto& entry : entries) head_->session().append(std::move(entry));

  events_ = std::make_unique<EventLog>(dir_ / "events.jsonl", std::move(events));
}

Session::~Session() {
  wait_idle();
  if (runner_.joinable()) runner_.join();
  if (events_) events_->close();
}

std::unique_ptr<Session> Session::restore(std::string id, std::filesystem::path dir,
                                          std::vector<std::string>* warnings) {
  std::ifstream in(dir / "config.json");
  if (!in) throw SessionNotFound(id);
  const SessionConfig config = SessionConfig::from_json(Json::parse(in));
  LoadedEvents loaded = EventLog::load(dir / "events.jsonl");
  if (loaded.warning && warnings) warnings->push_back(*loaded.warning);
  return std::unique_ptr<Session>(
      new Session(std::move(id), config, std::move(dir), std::move(loaded.events), Restored{}));
}

std::string Session::begin_run(const std::string& text) {
  std::lock_guard lock(mu_);
  if (busy_) throw SessionBusy(id_);
  busy_ = true;
  const std::string run_id = "run-" + std::to_string(++runs_);
  events_->append(EventKind::user_input, run_id, {{"text", text}});
  return run_id;
}

void Session::execute(const std::string& run_id, const std::string& text) {
  Recorder recorder(*this, run_id);
  agents::RunResult result;
  std::optional<std::string> failure;
  head_->set_observer(&recorder);
  try {
    result = head_->execute(text, config_.method, run_id);
  } catch (const std::exception& e) {
    failure = e.what();
  }
  head_->set_observer(nullptr);

  Json response;
  if (failure) {
    recorder.on_error(std::nullopt, *failure);
    response = {{"response", "The request could not be completed: " + *failure}, {"fallback", true}};
  } else {
    try {
      write_json(dir_ / "runs" / (run_id + ".json"), result.to_json());
    } catch (const std::exception& e) {
      recorder.on_error(std::nullopt, e.what());
    }
    response = {{"response", result.response},
                {"fallback", result.response_fallback},
                {"entry", head_->session().entries().back().to_json()}};
  }

  std::lock_guard lock(mu_);
  if (!failure) history_.push_back(head_->session().entries().back());
  fleet_snapshot_ = fleet_->snapshot();
  events_->append(EventKind::state_update, run_id, fleet_snapshot_);
  events_->append(EventKind::response, run_id, std::move(response));
  busy_ = false;
  idle_cv_.notify_all();
}

std::string Session::submit(const std::string& text) {
  const std::string run_id = begin_run(text);
  if (runner_.joinable()) runner_.join();
  runner_ = std::thread([this, run_id, text] { execute(run_id, text); });
  return run_id;
}

std::string Session::run(const std::string& text) {
  const std::string run_id = begin_run(text);
  execute(run_id, text);
  return run_id;
}

bool Session::busy() const {
  std::lock_guard lock(mu_);
  return busy_;
}

void Session::wait_idle() {
  std::unique_lock lock(mu_);
  idle_cv_.wait(lock, [&] { return !busy_; });
}

Json Session::fleet() const {
  std::lock_guard lock(mu_);
  return fleet_snapshot_;
}

size_t Session::history_size() const {
  std::lock_guard lock(mu_);
  return history_.size();
}

std::vector<agents::SessionEntry> Session::history() const {
  std::lock_guard lock(mu_);
  return history_;
}

std::optional<Json> Session::transcript(const std::string& run_id) const {
  if (!valid_id(run_id)) return std::nullopt;
  std::ifstream in(dir_ / "runs" / (run_id + ".json"));
  if (!in) return std::nullopt;
  const Json j = Json::parse(in, nullptr, false);
  if (j.is_discarded()) return std::nullopt;
  return std::optional<Json>(std::in_place, j);
}

Json Session::summary() const {
  std::lock_guard lock(mu_);
  return {{"session_id", id_},
          {"config", config_.to_json()},
          {"busy", busy_},
          {"runs", runs_},
          {"history_size", history_.size()},
          {"last_sequence", events_->last_sequence()},
          {"fleet", fleet_snapshot_}};
}

SessionManager::SessionManager(std::filesystem::path data_dir, SessionConfig defaults)
    : root_(std::move(data_dir) / "sessions"), defaults_(std::move(defaults)) {
  std::filesystem::create_directories(root_);
}

std::string SessionManager::create(const SessionConfig& config) {
  if (auto problems = config.validate(); !problems.empty()) throw ConfigError(std::move(problems));
  std::lock_guard lock(mu_);
  std::string id;
  do {
    id = random_id();
  } while (sessions_.count(id) || std::filesystem::exists(root_ / id));
  sessions_[id] = std::make_shared<Session>(id, config, root_ / id);
  return id;
}

std::string SessionManager::create_from_json(const Json& body) {
  return create(SessionConfig::from_json(body.is_null() ? Json::object() : body, defaults_));
}

std::shared_ptr<Session> SessionManager::get(const std::string& id) {
  if (!valid_id(id)) throw SessionNotFound(id);
  std::lock_guard lock(mu_);
  if (auto it = sessions_.find(id); it != sessions_.end()) return it->second;
  if (!std::filesystem::exists(root_ / id / "config.json")) throw SessionNotFound(id);
  std::shared_ptr<Session> s = Session::restore(id, root_ / id, &warnings_);
  sessions_[id] = s;
  return s;
}

std::vector<std::string> SessionManager::ids() const {
  std::lock_guard lock(mu_);
  std::set<std::string> out;
  for (const auto& [id, s] : sessions_) out.insert(id);
  // Sessions persisted by an earlier process are listed before first access.
  for (const auto& entry : std::filesystem::directory_iterator(root_)) {
    if (entry.is_directory() && std::filesystem::exists(entry.path() / "config.json")) {
      out.insert(entry.path().filename().string());
    }
  }
  return {out.begin(), out.end()};
}

}  // namespace aeroreact::service
