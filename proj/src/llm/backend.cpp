#include "aeroreact/llm/backend.hpp"

#include <httplib.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

namespace aeroreact::llm {

namespace {

std::string join_problems(const std::vector<std::string>& problems) {
  std::string out;
  for (size_t i = 0; i < problems.size(); ++i) out += (i ? "; " : "") + problems[i];
  return out;
}

}  // namespace

StructuredOutputError::StructuredOutputError(TemplateId schema, int attempts,
                                             std::vector<std::string> problems)
    : std::runtime_error("no valid '" + std::string(to_string(schema)) + "' output after " +
                         std::to_string(attempts) + " attempt(s): " + join_problems(problems)),
      schema_(schema),
      attempts_(attempts),
      problems_(std::move(problems)) {}

// ---------------------------------------------------------------------------
// BackendConfig

std::vector<std::string> BackendConfig::validate() const {
  std::vector<std::string> problems;
  if (max_retries < 0 || max_retries > 10) problems.push_back("backend.max_retries must be in [0, 10]");
  if (kind == Kind::http) {
    if (endpoint.empty()) problems.push_back("backend.endpoint is required for http backends");
    if (model_name.empty()) problems.push_back("backend.model_name is required for http backends");
    if (!script_path.empty()) problems.push_back("backend.script_path is not allowed for http backends");
  } else {
    if (script_path.empty()) problems.push_back("backend.script_path is required for scripted backends");
    if (!endpoint.empty()) problems.push_back("backend.endpoint is not allowed for scripted backends");
  }
  return problems;
}

Json BackendConfig::to_json() const {
  Json j{{"kind", kind == Kind::http ? "http" : "scripted"}, {"model_name", model_name}};
  if (kind == Kind::http) {
    j["endpoint"] = endpoint;
  } else {
    j["script_path"] = script_path.string();
  }
  j["max_retries"] = max_retries;
  return j;
}

BackendConfig BackendConfig::from_json(const Json& j) {
  BackendConfig c;
  const std::string kind = j.value("kind", "scripted");
  if (kind == "http") {
    c.kind = Kind::http;
  } else if (kind == "scripted") {
    c.kind = Kind::scripted;
  } else {
    throw std::invalid_argument("backend.kind must be 'http' or 'scripted', got '" + kind + "'");
  }
  c.model_name = j.value("model_name", c.kind == Kind::scripted ? "scripted" : "");
  c.endpoint = j.value("endpoint", "");
  c.script_path = j.value("script_path", "");
  c.max_retries = j.value("max_retries", 1);
  return c;
}

BackendConfig BackendConfig::from_spec(std::string_view spec) {
  BackendConfig c;
  if (spec.starts_with("scripted:")) {
    c.kind = Kind::scripted;
    c.model_name = "scripted";
    c.script_path = std::string(spec.substr(9));
  } else if (spec.starts_with("http:")) {
    c.kind = Kind::http;
    std::string rest(spec.substr(5));
    const auto at = rest.find('@');
    if (at == std::string::npos) throw std::invalid_argument("http backend spec must be http:<model>@<endpoint>");
    c.model_name = rest.substr(0, at);
    c.endpoint = rest.substr(at + 1);
  } else {
    throw std::invalid_argument("backend spec must start with 'scripted:' or 'http:'");
  }
  return c;
}

// ---------------------------------------------------------------------------
// Script

void Script::add(ScriptEntry entry) {
  entries_[{entry.thread, static_cast<int>(entry.template_id), entry.ordinal}] = std::move(entry.output);
}

const std::string* Script::find(const std::string& thread, TemplateId id, int ordinal) const {
  auto it = entries_.find({thread, static_cast<int>(id), ordinal});
  return it == entries_.end() ? nullptr : &it->second;
}

Script Script::parse_jsonl(std::istream& in) {
  Script script;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    Json j = Json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
      throw std::runtime_error("script line " + std::to_string(line_no) + " is not a JSON object");
    }
    ScriptEntry e;
    e.thread = j.at("thread").get<std::string>();
    const auto id = parse_template_id(j.at("template").get<std::string>());
    if (!id) throw std::runtime_error("script line " + std::to_string(line_no) + " has an unknown template");
    e.template_id = *id;
    e.ordinal = j.at("ordinal").get<int>();
    const Json& output = j.at("output");
    e.output = output.is_string() ? output.get<std::string>() : output.dump();
    script.add(std::move(e));
  }
  return script;
}

Script Script::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open script " + path.string());
  return parse_jsonl(in);
}

void Script::write_jsonl(std::ostream& out) const {
  for (const auto& [key, output] : entries_) {
    const auto& [thread, id, ordinal] = key;
    Json j{{"thread", thread},
           {"template", to_string(static_cast<TemplateId>(id))},
           {"ordinal", ordinal},
           {"output", output}};
    out << j.dump() << '\n';
  }
}

// ---------------------------------------------------------------------------
// ScriptedBackend

ScriptedBackend::ScriptedBackend(std::shared_ptr<const Script> script, std::string model)
    : script_(std::move(script)), model_(std::move(model)) {}

std::string ScriptedBackend::generate(const CompletionRequest& request) {
  int ordinal = 0;
  {
    std::lock_guard lock(mutex_);
    ordinal = ++counters_[{request.thread, static_cast<int>(request.template_id)}];
  }
  const std::string* output = script_->find(request.thread, request.template_id, ordinal);
  if (!output) {
    throw TransportError("script has no entry for thread '" + request.thread + "', template '" +
                         std::string(to_string(request.template_id)) + "', ordinal " +
                         std::to_string(ordinal));
  }
  return *output;
}

int ScriptedBackend::calls(const std::string& thread, TemplateId id) const {
  std::lock_guard lock(mutex_);
  auto it = counters_.find({thread, static_cast<int>(id)});
  return it == counters_.end() ? 0 : it->second;
}

void ScriptedBackend::reset() {
  std::lock_guard lock(mutex_);
  counters_.clear();
}

// ---------------------------------------------------------------------------
// HttpBackend

HttpBackend::HttpBackend(std::string endpoint, std::string model, int timeout_seconds)
    : model_(std::move(model)), timeout_seconds_(timeout_seconds) {
  const auto scheme_end = endpoint.find("://");
  if (scheme_end == std::string::npos) throw std::invalid_argument("endpoint must be an http(s) URL");
  const auto path_start = endpoint.find('/', scheme_end + 3);
  base_ = endpoint.substr(0, path_start);
  path_ = path_start == std::string::npos ? "/v1/chat/completions" : endpoint.substr(path_start);
}

std::string HttpBackend::generate(const CompletionRequest& request) {
  Json messages = Json::array();
  for (const auto& m : request.messages) messages.push_back({{"role", m.role}, {"content", m.content}});
  const Json body{{"model", model_}, {"messages", std::move(messages)}};

  httplib::Client client(base_);
  client.set_connection_timeout(timeout_seconds_);
  client.set_read_timeout(timeout_seconds_);
  httplib::Headers headers;
  if (const char* key = std::getenv("AEROREACT_API_KEY"); key && *key) {
    headers.emplace("Authorization", std::string("Bearer ") + key);
  }
  auto res = client.Post(path_, headers, body.dump(), "application/json");
  if (!res) throw TransportError("request to " + base_ + path_ + " failed: " + httplib::to_string(res.error()));
  if (res->status < 200 || res->status >= 300) {
    throw TransportError("endpoint returned HTTP " + std::to_string(res->status) + ": " + res->body);
  }
  Json reply = Json::parse(res->body, nullptr, false);
  if (reply.is_discarded()) throw TransportError("endpoint returned a non-JSON body");
  try {
    return reply.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const Json::exception& e) {
    throw TransportError(std::string("unexpected completion shape: ") + e.what());
  }
}

std::unique_ptr<Backend> make_backend(const BackendConfig& config) {
  if (auto problems = config.validate(); !problems.empty()) {
    throw std::invalid_argument(join_problems(problems));
  }
  if (config.kind == BackendConfig::Kind::http) {
    return std::make_unique<HttpBackend>(config.endpoint, config.model_name);
  }
  auto script = std::make_shared<const Script>(Script::load(config.script_path));
  return std::make_unique<ScriptedBackend>(std::move(script),
                                           config.model_name.empty() ? "scripted" : config.model_name);
}

// ---------------------------------------------------------------------------

StructuredOutput complete(Backend& backend, const std::string& thread, TemplateId schema,
                          const std::string& prompt, int max_retries) {
  CompletionRequest request{thread, schema, {{"user", prompt}}};
  std::vector<std::string> problems;
  for (int attempt = 0; attempt <= max_retries; ++attempt) {
    std::string raw = backend.generate(request);
    try {
      Json parsed = parse_structured(raw, schema);
      return {std::move(raw), std::move(parsed), schema, attempt};
    } catch (const ParseError& e) {
      problems = e.problems();
      request.messages.push_back({"assistant", raw});
      request.messages.push_back(
          {"user", "Your previous reply could not be used: " + join_problems(problems) +
                       ". Reply again with only the JSON object in the required format."});
    }
  }
  throw StructuredOutputError(schema, max_retries + 1, std::move(problems));
}

}  // namespace aeroreact::llm
