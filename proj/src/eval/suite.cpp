#include "aeroreact/eval/suite.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace aeroreact::eval {

namespace {

constexpr std::array<std::string_view, 3> kComplexityNames = {"easy", "medium", "hard"};
constexpr double kParamTolerance = 1e-6;

bool value_matches(const Json& matcher, const Json& actual) {
  if (matcher.is_string() && matcher.get<std::string>() == "*") return true;
  if (matcher.is_object() && matcher.contains("abs")) {
    return actual.is_number() &&
           std::abs(std::abs(actual.get<double>()) - matcher["abs"].get<double>()) <= kParamTolerance;
  }
  if (matcher.is_number()) {
    return actual.is_number() && std::abs(actual.get<double>() - matcher.get<double>()) <= kParamTolerance;
  }
  return matcher == actual;
}

}  // namespace

std::string_view to_string(Complexity c) { return kComplexityNames[static_cast<size_t>(c)]; }

std::optional<Complexity> parse_complexity(std::string_view name) {
  for (size_t i = 0; i < kComplexityNames.size(); ++i) {
    if (kComplexityNames[i] == name) return static_cast<Complexity>(i);
  }
  return std::nullopt;
}

bool ExpectedAction::matches(const tools::ToolCall& call) const {
  if (call.tool_name != tool || call.drone_id != drone_id) return false;
  for (const auto& [key, matcher] : params.items()) {
    if (!call.parameters.contains(key)) return false;
    if (!value_matches(matcher, call.parameters[key])) return false;
  }
  return true;
}

Json ExpectedAction::to_json() const { return {{"tool", tool}, {"params", params}}; }

Json Predicate::to_json() const {
  Json j{{"type", type}};
  if (drone) j["drone"] = *drone;
  for (const auto& [k, v] : spec.items()) j[k] = v;
  if (!description.empty()) j["description"] = description;
  return j;
}

Predicate Predicate::from_json(const Json& j) {
  static const std::set<std::string> known = {"action_succeeded", "reached",  "captured_near",
                                              "captured_from_side", "analyzed", "response_mentions"};
  Predicate p;
  p.type = j.at("type").get<std::string>();
  if (!known.count(p.type)) throw std::invalid_argument("unknown predicate type '" + p.type + "'");
  if (j.contains("drone")) p.drone = j["drone"].get<int>();
  p.description = j.value("description", "");
  for (const auto& [k, v] : j.items()) {
    if (k != "type" && k != "drone" && k != "description") p.spec[k] = v;
  }
  return p;
}

std::vector<int> TaskSpec::required_drones() const {
  std::set<int> ids;
  for (const auto& [id, seq] : expected) {
    if (!seq.empty()) ids.insert(id);
  }
  for (const auto& p : predicates) {
    if (p.drone) ids.insert(*p.drone);
  }
  return {ids.begin(), ids.end()};
}

Json TaskSpec::to_json() const {
  Json j{{"id", id}, {"complexity", to_string(complexity)}, {"prompt", prompt}};
  if (!setup.empty()) {
    Json s = Json::array();
    for (const auto& c : setup) {
      Json cmd = sim::to_json(c.command);
      s.push_back({{"drone", c.drone_id}, {"command", cmd}});
    }
    j["setup"] = s;
  }
  if (complexity == Complexity::hard) {
    Json preds = Json::array();
    for (const auto& p : predicates) preds.push_back(p.to_json());
    j["predicates"] = preds;
  } else {
    Json exp = Json::object();
    for (const auto& [id, seq] : expected) {
      Json arr = Json::array();
      for (const auto& a : seq) arr.push_back(a.to_json());
      exp[std::to_string(id)] = arr;
    }
    j["expected"] = exp;
  }
  return j;
}

TaskSpec TaskSpec::from_json(const Json& j) {
  TaskSpec t;
  t.id = j.at("id").get<std::string>();
  const std::string label = j.at("complexity").get<std::string>();
  const auto c = parse_complexity(label);
  if (!c) throw std::invalid_argument("task '" + t.id + "' has invalid complexity '" + label + "'");
  t.complexity = *c;
  t.prompt = j.at("prompt").get<std::string>();
  if (j.contains("setup")) {
    for (const auto& s : j["setup"]) {
      SetupCommand cmd;
      cmd.drone_id = s.at("drone").get<int>();
      cmd.command = sim::command_from_json(s.at("command"));
      cmd.command.validate();
      t.setup.push_back(cmd);
    }
  }
  if (t.complexity == Complexity::hard) {
    if (!j.contains("predicates")) throw std::invalid_argument("hard task '" + t.id + "' needs predicates");
    for (const auto& p : j["predicates"]) t.predicates.push_back(Predicate::from_json(p));
    t.max_points = static_cast<int>(t.predicates.size());
  } else {
    if (!j.contains("expected")) throw std::invalid_argument("task '" + t.id + "' needs expected actions");
    for (const auto& [key, seq] : j["expected"].items()) {
      const int id = std::stoi(key);
      auto& list = t.expected[id];
      for (const auto& a : seq) {
        ExpectedAction e;
        e.tool = a.at("tool").get<std::string>();
        e.params = a.value("params", Json::object());
        e.drone_id = id;
        list.push_back(std::move(e));
      }
      t.max_points += static_cast<int>(list.size());
    }
  }
  return t;
}

SuiteLoad parse_suite(const Json& doc) {
  SuiteLoad load;
  const Json& tasks = doc.is_object() ? doc.value("tasks", Json::array()) : doc;
  std::set<std::string> ids;
  for (const auto& item : tasks) {
    TaskSpec t = TaskSpec::from_json(item);
    if (!ids.insert(t.id).second) throw std::invalid_argument("duplicate task id '" + t.id + "'");
    const auto c = static_cast<size_t>(t.complexity);
    load.totals[c] += t.max_points;
    load.counts[c] += 1;
    load.tasks.push_back(std::move(t));
  }
  if (load.tasks.empty()) load.warnings.push_back("suite contains no tasks");
  if (load.totals != kSuiteTotals) {
    std::ostringstream os;
    os << "suite maxima " << load.totals[0] << "/" << load.totals[1] << "/" << load.totals[2]
       << " differ from the reference " << kSuiteTotals[0] << "/" << kSuiteTotals[1] << "/" << kSuiteTotals[2]
       << "; per task:";
    for (const auto& t : load.tasks) os << ' ' << t.id << '=' << t.max_points;
    load.warnings.push_back(os.str());
  }
  return load;
}

SuiteLoad load_suite(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open suite " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  if (buf.str().find_first_not_of(" \t\r\n") == std::string::npos) return parse_suite(Json::array());
  return parse_suite(Json::parse(buf.str()));
}

}  // namespace aeroreact::eval
