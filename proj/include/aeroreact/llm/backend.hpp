#pragma once

#include "aeroreact/json.hpp"
#include "aeroreact/llm/structured.hpp"
#include "aeroreact/llm/templates.hpp"

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

namespace aeroreact::llm {

struct Message {
  std::string role;  // "user" or "assistant"
  std::string content;
};

struct CompletionRequest {
  std::string thread;  // e.g. "task-1/drone-2"
  TemplateId template_id = TemplateId::reason;
  std::vector<Message> messages;
};

/// Backend unreachable, non-2xx reply, or (scripted) no entry for a call.
class TransportError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The model kept producing unusable output after every repair attempt.
class StructuredOutputError : public std::runtime_error {
 public:
  StructuredOutputError(TemplateId schema, int attempts, std::vector<std::string> problems);
  TemplateId schema() const { return schema_; }
  int attempts() const { return attempts_; }
  const std::vector<std::string>& problems() const { return problems_; }

 private:
  TemplateId schema_;
  int attempts_;
  std::vector<std::string> problems_;
};

class Backend {
 public:
  virtual ~Backend() = default;
  virtual std::string generate(const CompletionRequest& request) = 0;
  virtual std::string model_name() const = 0;
};

struct BackendConfig {
  enum class Kind { http, scripted };
  Kind kind = Kind::scripted;
  std::string model_name;
  std::string endpoint;                  // http only
  std::filesystem::path script_path;     // scripted only
  int max_retries = 1;

  /// Field-level problems; empty when the config is usable.
  std::vector<std::string> validate() const;
  Json to_json() const;
  static BackendConfig from_json(const Json& j);
  /// "scripted:<path>" or "http:<model>@<endpoint>".
  static BackendConfig from_spec(std::string_view spec);
};

struct ScriptEntry {
  std::string thread;
  TemplateId template_id = TemplateId::reason;
  int ordinal = 1;
  std::string output;
};

/// Recorded model outputs keyed by (thread, template, call ordinal).
class Script {
 public:
  void add(ScriptEntry entry);
  const std::string* find(const std::string& thread, TemplateId id, int ordinal) const;
  size_t size() const { return entries_.size(); }

  static Script parse_jsonl(std::istream& in);
  static Script load(const std::filesystem::path& path);
  void write_jsonl(std::ostream& out) const;

 private:
  std::map<std::tuple<std::string, int, int>, std::string> entries_;
};

/// Replays a Script. Each call consumes the next ordinal for its
/// (thread, template) pair; counters are independent per thread.
class ScriptedBackend final : public Backend {
 public:
  explicit ScriptedBackend(std::shared_ptr<const Script> script, std::string model = "scripted");

  std::string generate(const CompletionRequest& request) override;
  std::string model_name() const override { return model_; }

  int calls(const std::string& thread, TemplateId id) const;
  void reset();

 private:
  std::shared_ptr<const Script> script_;
  std::string model_;
  mutable std::mutex mutex_;
  std::map<std::pair<std::string, int>, int> counters_;
};

/// Chat-completions endpoint: POST {model, messages} and read
/// choices[0].message.content. API key from AEROREACT_API_KEY.
class HttpBackend final : public Backend {
 public:
  HttpBackend(std::string endpoint, std::string model, int timeout_seconds = 120);

  std::string generate(const CompletionRequest& request) override;
  std::string model_name() const override { return model_; }

 private:
  std::string base_;
  std::string path_;
  std::string model_;
  int timeout_seconds_;
};

std::unique_ptr<Backend> make_backend(const BackendConfig& config);

/// Sends `prompt`, parses the reply for `schema`, and on a parse failure
/// re-prompts with the error appended, up to `max_retries` times. Throws
/// StructuredOutputError once retries are exhausted.
StructuredOutput complete(Backend& backend, const std::string& thread, TemplateId schema,
                          const std::string& prompt, int max_retries = 1);

}  // namespace aeroreact::llm
