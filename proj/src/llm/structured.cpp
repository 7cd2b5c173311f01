#include "aeroreact/llm/structured.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <utility>

namespace aeroreact::llm {

namespace {

enum class KeyType { string, boolean, object };

struct KeySpec {
  const char* name;
  KeyType type;
  bool optional = false;
};

const std::vector<KeySpec>& keys_for(TemplateId schema) {
  static const std::vector<KeySpec> reason = {{"reasoning", KeyType::string},
                                              {"intended_action", KeyType::string}};
  static const std::vector<KeySpec> reason_flag = {{"reasoning", KeyType::string},
                                                   {"intended_action", KeyType::string},
                                                   {"end_flag", KeyType::boolean}};
  static const std::vector<KeySpec> call = {{"function_call", KeyType::string},
                                            {"parameters", KeyType::object, true}};
  static const std::vector<KeySpec> evaluate = {{"evaluation_summary", KeyType::string},
                                                {"end_flag", KeyType::boolean},
                                                {"next_steps_notes", KeyType::string}};
  static const std::vector<KeySpec> respond = {{"response", KeyType::string}};
  static const std::vector<KeySpec> drone_task = {{"plan", KeyType::string},
                                                  {"expected_outcome", KeyType::string},
                                                  {"end_flag", KeyType::boolean}};
  switch (schema) {
    case TemplateId::reason: return reason;
    case TemplateId::reason_with_end_flag: return reason_flag;
    case TemplateId::act:
    case TemplateId::act_direct: return call;
    case TemplateId::evaluate: return evaluate;
    case TemplateId::respond: return respond;
    case TemplateId::plan: return drone_task;
  }
  return reason;
}

std::string_view type_name(KeyType t) {
  switch (t) {
    case KeyType::string: return "string";
    case KeyType::boolean: return "boolean";
    case KeyType::object: return "object";
  }
  return "value";
}

bool has_type(const Json& v, KeyType t) {
  switch (t) {
    case KeyType::string: return v.is_string();
    case KeyType::boolean: return v.is_boolean();
    case KeyType::object: return v.is_object();
  }
  return false;
}

// Canonicalizes keys of `in` and copies the declared ones, in declared order,
// into a fresh object. Problems are appended with `where` as prefix.
Json validate_record(const Json& in, const std::vector<KeySpec>& spec, const std::string& where,
                     std::vector<std::string>& problems) {
  std::map<std::string, const Json*> by_key;
  for (const auto& [key, value] : in.items()) by_key.emplace(canonical_key(key), &value);

  Json out = Json::object();
  for (const auto& k : spec) {
    auto it = by_key.find(k.name);
    if (it == by_key.end()) {
      if (k.optional) {
        if (k.type == KeyType::object) out[k.name] = Json::object();
        continue;
      }
      problems.push_back(where + "missing key '" + k.name + "'");
      continue;
    }
    if (!has_type(*it->second, k.type)) {
      problems.push_back(where + "key '" + k.name + "' must be a " + std::string(type_name(k.type)) +
                         ", got " + it->second->type_name());
      continue;
    }
    out[k.name] = *it->second;
  }
  return out;
}

bool is_positive_integer(std::string_view s) {
  if (s.empty() || s.size() > 9) return false;
  if (!std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c); })) return false;
  return s.front() != '0';
}

Json validate_plan(const Json& in, std::vector<std::string>& problems) {
  std::vector<std::pair<int, const Json*>> drones;
  const Json* response = nullptr;
  for (const auto& [key, value] : in.items()) {
    if (canonical_key(key) == "response_to_user") {
      response = &value;
    } else if (is_positive_integer(key)) {
      drones.emplace_back(std::stoi(key), &value);
    } else {
      problems.push_back("key '" + key + "' is not a drone id (positive integer) or response_to_user");
    }
  }
  std::sort(drones.begin(), drones.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });

  Json out = Json::object();
  for (const auto& [id, value] : drones) {
    const std::string where = "drone \"" + std::to_string(id) + "\": ";
    if (!value->is_object()) {
      problems.push_back(where + "value must be an object");
      continue;
    }
    out[std::to_string(id)] = validate_record(*value, keys_for(TemplateId::plan), where, problems);
  }
  if (!response) {
    problems.push_back("missing key 'response_to_user'");
  } else if (!response->is_string()) {
    problems.push_back("key 'response_to_user' must be a string, got " + std::string(response->type_name()));
  } else {
    out["response_to_user"] = *response;
  }
  return out;
}

}  // namespace

ParseError::ParseError(std::vector<std::string> problems)
    : std::runtime_error([&] {
        std::string msg = "structured output rejected: ";
        for (size_t i = 0; i < problems.size(); ++i) msg += (i ? "; " : "") + problems[i];
        return msg;
      }()),
      problems_(std::move(problems)) {}

std::optional<std::string> extract_json_object(std::string_view text) {
  size_t start = text.find('{');
  while (start != std::string_view::npos) {
    int depth = 0;
    bool in_string = false;
    bool escaped = false;
    for (size_t i = start; i < text.size(); ++i) {
      const char c = text[i];
      if (in_string) {
        if (escaped) {
          escaped = false;
        } else if (c == '\\') {
          escaped = true;
        } else if (c == '"') {
          in_string = false;
        }
        continue;
      }
      if (c == '"') {
        in_string = true;
      } else if (c == '{') {
        ++depth;
      } else if (c == '}') {
        if (--depth == 0) return std::string(text.substr(start, i - start + 1));
      }
    }
    // Unbalanced from this brace; try the next one.
    start = text.find('{', start + 1);
  }
  return std::nullopt;
}

std::string canonical_key(std::string_view key) {
  std::string k;
  k.reserve(key.size());
  for (unsigned char c : key) {
    if (c == ' ' || c == '-') {
      k += '_';
    } else {
      k += static_cast<char>(std::tolower(c));
    }
  }
  static const std::map<std::string, std::string> aliases = {
      {"reason", "reasoning"},
      {"evaluation", "evaluation_summary"},
      {"next_step_notes", "next_steps_notes"},
      {"intendedaction", "intended_action"},
      {"function", "function_call"},
      {"params", "parameters"},
      {"arguments", "parameters"},
  };
  auto it = aliases.find(k);
  return it == aliases.end() ? k : it->second;
}

Json parse_structured(std::string_view raw_text, TemplateId schema) {
  auto object_text = extract_json_object(raw_text);
  if (!object_text) throw ParseError({"no JSON object found"});
  Json doc = Json::parse(*object_text, nullptr, false);
  if (doc.is_discarded()) throw ParseError({"invalid JSON: " + *object_text});

  std::vector<std::string> problems;
  Json parsed = schema == TemplateId::plan ? validate_plan(doc, problems)
                                           : validate_record(doc, keys_for(schema), "", problems);
  if (!problems.empty()) throw ParseError(std::move(problems));
  return parsed;
}

}  // namespace aeroreact::llm
