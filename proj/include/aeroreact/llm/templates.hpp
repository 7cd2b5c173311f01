#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace aeroreact::llm {

enum class TemplateId { plan, reason, reason_with_end_flag, act, evaluate, respond, act_direct };

std::string_view to_string(TemplateId id);
std::optional<TemplateId> parse_template_id(std::string_view name);

using PromptContext = std::map<std::string, std::string>;

class RenderError : public std::runtime_error {
 public:
  RenderError(TemplateId id, std::string placeholder);
  const std::string& placeholder() const { return placeholder_; }

 private:
  std::string placeholder_;
};

/// Raw template body with `{{name}}` placeholders.
std::string_view template_body(TemplateId id);

/// Placeholder names in order of first appearance.
std::vector<std::string> placeholders(TemplateId id);

/// Substitutes every placeholder from `context`; throws RenderError naming
/// the first placeholder with no binding.
std::string render(TemplateId id, const PromptContext& context);

}  // namespace aeroreact::llm
