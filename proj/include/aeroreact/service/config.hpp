#pragma once

#include "aeroreact/json.hpp"
#include "aeroreact/llm/backend.hpp"
#include "aeroreact/tools/toolbelt.hpp"

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace aeroreact::service {

/// Rejected configuration; `problems` holds one message per bad field.
class ConfigError : public std::invalid_argument {
 public:
  explicit ConfigError(std::vector<std::string> problems);
  const std::vector<std::string>& problems() const { return problems_; }

 private:
  std::vector<std::string> problems_;
};

struct SessionConfig {
  int n_drones = 2;
  double spacing = 2.0;
  tools::Method method = tools::Method::reacteval;
  llm::BackendConfig backend;
  std::filesystem::path scene_path;  // empty: no scene objects
  int max_iters = 20;

  std::vector<std::string> validate() const;
  Json to_json() const;
  /// Fields absent from `j` keep the values of `base`. Throws ConfigError.
  static SessionConfig from_json(const Json& j, const SessionConfig& base);
  static SessionConfig from_json(const Json& j);
};

struct ServiceConfig {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::filesystem::path data_dir;
  SessionConfig session;  // defaults for POST /sessions

  static ServiceConfig from_json(const Json& j);
  static ServiceConfig load(const std::filesystem::path& path);
};

/// AEROREACT_DATA_DIR, else ./aeroreact-data.
std::filesystem::path default_data_dir();

}  // namespace aeroreact::service
