#pragma once

#include "aeroreact/json.hpp"
#include "aeroreact/llm/templates.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace aeroreact::llm {

/// Raised when model output cannot be turned into the record a schema needs.
/// `problems` lists every offending key, or the extraction failure.
class ParseError : public std::runtime_error {
 public:
  explicit ParseError(std::vector<std::string> problems);
  const std::vector<std::string>& problems() const { return problems_; }

 private:
  std::vector<std::string> problems_;
};

struct StructuredOutput {
  std::string raw_text;
  Json parsed;
  TemplateId schema_id = TemplateId::reason;
  int retries = 0;
};

/// Outermost balanced JSON object in `text`, ignoring code fences and any
/// prose around it. Empty when none is found.
std::optional<std::string> extract_json_object(std::string_view text);

/// "intended action" -> "intended_action", "reason" -> "reasoning", etc.
std::string canonical_key(std::string_view key);

/// Extracts, canonicalizes and validates model output for `schema`. The
/// result holds exactly the schema's keys, in schema order.
Json parse_structured(std::string_view raw_text, TemplateId schema);

}  // namespace aeroreact::llm
