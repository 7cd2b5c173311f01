#include "aeroreact/service/config.hpp"

#include <cstdlib>
#include <fstream>

namespace aeroreact::service {

namespace {

std::string join(const std::vector<std::string>& problems) {
  std::string s = "invalid config";
  for (const auto& p : problems) s += "; " + p;
  return s;
}

template <typename T>
void read_field(const Json& j, const char* key, T& out, const char* type, std::vector<std::string>& problems) {
  if (!j.contains(key)) return;
  try {
    out = j[key].get<T>();
  } catch (const Json::exception&) {
    problems.push_back(std::string(key) + ": must be " + type);
  }
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> problems)
    : std::invalid_argument(join(problems)), problems_(std::move(problems)) {}

std::vector<std::string> SessionConfig::validate() const {
  std::vector<std::string> problems;
  if (n_drones < 1) problems.push_back("n_drones: must be a positive integer");
  if (!(spacing > 0.0)) problems.push_back("spacing: must be a positive number of meters");
  if (max_iters < 1) problems.push_back("max_iters: must be a positive integer");
  for (const auto& p : backend.validate()) problems.push_back(p);
  if (!scene_path.empty() && !std::filesystem::exists(scene_path)) {
    problems.push_back("scene_path: file not found: " + scene_path.string());
  }
  return problems;
}

Json SessionConfig::to_json() const {
  return {{"n_drones", n_drones},
          {"spacing", spacing},
          {"method", tools::to_string(method)},
          {"backend", backend.to_json()},
          {"scene_path", scene_path.string()},
          {"max_iters", max_iters}};
}

SessionConfig SessionConfig::from_json(const Json& j, const SessionConfig& base) {
  if (!j.is_object()) throw ConfigError({"config: must be a JSON object"});
  SessionConfig c = base;
  std::vector<std::string> problems;
  if (j.contains("n_drones") && !j["n_drones"].is_number_integer()) {
    problems.push_back("n_drones: must be a positive integer");
  } else {
    read_field(j, "n_drones", c.n_drones, "a positive integer", problems);
  }
  if (j.contains("max_iters") && !j["max_iters"].is_number_integer()) {
    problems.push_back("max_iters: must be a positive integer");
  } else {
    read_field(j, "max_iters", c.max_iters, "a positive integer", problems);
  }
  read_field(j, "spacing", c.spacing, "a number", problems);
  if (j.contains("method")) {
    const auto m = j["method"].is_string() ? tools::parse_method(j["method"].get<std::string>()) : std::nullopt;
    if (m) {
      c.method = *m;
    } else {
      problems.push_back("method: must be one of reacteval, react, act");
    }
  }
  if (j.contains("scene_path")) {
    std::string scene;
    read_field(j, "scene_path", scene, "a string", problems);
    c.scene_path = scene;
  }
  if (j.contains("backend")) {
    try {
      if (j["backend"].is_string()) {
        c.backend = llm::BackendConfig::from_spec(j["backend"].get<std::string>());
      } else {
        c.backend = llm::BackendConfig::from_json(j["backend"]);
      }
    } catch (const std::exception& e) {
      problems.push_back(std::string("backend: ") + e.what());
    }
  }
  if (problems.empty()) problems = c.validate();
  if (!problems.empty()) throw ConfigError(std::move(problems));
  return c;
}

SessionConfig SessionConfig::from_json(const Json& j) { return from_json(j, SessionConfig{}); }

ServiceConfig ServiceConfig::from_json(const Json& j) {
  ServiceConfig c;
  c.host = j.value("host", c.host);
  c.port = j.value("port", c.port);
  c.data_dir = j.contains("data_dir") ? std::filesystem::path(j["data_dir"].get<std::string>()) : default_data_dir();
  Json session = j.value("session", Json::object());
  // Allow a flat layout where session fields sit at the top level.
  for (const char* key : {"n_drones", "spacing", "method", "backend", "scene_path", "max_iters"}) {
    if (j.contains(key) && !session.contains(key)) session[key] = j[key];
  }
  c.session = SessionConfig::from_json(session);
  return c;
}

ServiceConfig ServiceConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config " + path.string());
  Json j = Json::parse(in);
  // Relative file paths in a config file are relative to the file.
  const auto base = path.parent_path();
  auto resolve = [&](Json& obj, const char* key) {
    if (obj.is_object() && obj.contains(key) && obj[key].is_string()) {
      std::filesystem::path p = obj[key].get<std::string>();
      if (!p.empty() && p.is_relative()) obj[key] = (base / p).string();
    }
  };
  for (Json* scope : {&j, j.contains("session") ? &j["session"] : nullptr}) {
    if (!scope) continue;
    resolve(*scope, "scene_path");
    if (scope->contains("backend")) {
      Json& b = (*scope)["backend"];
      if (b.is_string() && b.get<std::string>().starts_with("scripted:")) {
        std::filesystem::path p = b.get<std::string>().substr(9);
        if (p.is_relative()) b = "scripted:" + (base / p).string();
      } else {
        resolve(b, "script_path");
      }
    }
  }
  resolve(j, "data_dir");
  return from_json(j);
}

std::filesystem::path default_data_dir() {
  if (const char* dir = std::getenv("AEROREACT_DATA_DIR"); dir && *dir) return dir;
  return "aeroreact-data";
}

}  // namespace aeroreact::service
