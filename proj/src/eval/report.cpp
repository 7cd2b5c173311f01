#include "aeroreact/eval/report.hpp"

#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace aeroreact::eval {

namespace {

std::string fraction(int points, int max) { return std::to_string(points) + "/" + std::to_string(max); }

std::string seconds(double s) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", s);
  return buf;
}

std::string pad(const std::string& s, size_t width) {
  return s.size() >= width ? s : s + std::string(width - s.size(), ' ');
}

}  // namespace

double ReportRow::overall() const {
  const int total = std::accumulate(points.begin(), points.end(), 0);
  const int max = std::accumulate(max_points.begin(), max_points.end(), 0);
  return max == 0 ? 0.0 : static_cast<double>(total) / max;
}

Json ReportRow::to_json() const {
  Json j{{"method", method}, {"model", model}};
  for (size_t c = 0; c < 3; ++c) {
    const std::string name(to_string(static_cast<Complexity>(c)));
    j[name] = {{"points", points[c]}, {"max_points", max_points[c]}, {"mean_elapsed", mean_elapsed[c]}};
  }
  j["overall"] = overall();
  j["overall_text"] = format_overall(overall());
  Json hist = Json::object();
  for (size_t f = 0; f < 3; ++f) hist[std::string(to_string(static_cast<FailureMode>(f)))] = failures[f];
  j["failure_modes"] = hist;
  Json per_task = Json::array();
  for (const auto& t : tasks) per_task.push_back(t.to_json());
  j["tasks"] = per_task;
  return j;
}

ReportRow aggregate(const std::string& method, const std::string& model, const std::vector<TaskScore>& scores) {
  ReportRow row;
  row.method = method;
  row.model = model;
  row.tasks = scores;
  std::array<int, 3> counts{};
  for (const auto& s : scores) {
    const auto c = static_cast<size_t>(s.complexity);
    row.points[c] += s.points;
    row.max_points[c] += s.max_points;
    row.mean_elapsed[c] += s.elapsed;
    counts[c] += 1;
    if (s.failure) row.failures[static_cast<size_t>(*s.failure)] += 1;
  }
  for (size_t c = 0; c < 3; ++c) {
    if (counts[c] > 0) row.mean_elapsed[c] /= counts[c];
  }
  return row;
}

ReportRow row_from_fractions(const std::string& method, const std::string& model, std::array<int, 3> points,
                             std::array<int, 3> max_points) {
  ReportRow row;
  row.method = method;
  row.model = model;
  row.points = points;
  row.max_points = max_points;
  return row;
}

std::string format_overall(double overall) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", overall);
  return buf;
}

ReportDocument make_report(const std::vector<ReportRow>& rows) {
  if (rows.empty()) throw std::invalid_argument("report needs at least one result row");
  ReportDocument doc;
  doc.json = {{"rows", Json::array()}};
  for (const auto& r : rows) doc.json["rows"].push_back(r.to_json());

  const std::vector<std::string> header = {"Method",  "Model",    "Easy",   "Medium",    "Hard",  "Overall",
                                           "t_easy",  "t_medium", "t_hard", "incorrect", "early", "head"};
  std::vector<std::vector<std::string>> table = {header};
  for (const auto& r : rows) {
    table.push_back({r.method, r.model, fraction(r.points[0], r.max_points[0]),
                     fraction(r.points[1], r.max_points[1]), fraction(r.points[2], r.max_points[2]),
                     format_overall(r.overall()), seconds(r.mean_elapsed[0]), seconds(r.mean_elapsed[1]),
                     seconds(r.mean_elapsed[2]), std::to_string(r.failures[0]), std::to_string(r.failures[1]),
                     std::to_string(r.failures[2])});
  }
  std::vector<size_t> widths(header.size(), 0);
  for (const auto& line : table) {
    for (size_t i = 0; i < line.size(); ++i) widths[i] = std::max(widths[i], line[i].size());
  }
  std::ostringstream os;
  for (const auto& line : table) {
    std::string text;
    for (size_t i = 0; i < line.size(); ++i) text += pad(line[i], widths[i] + 2);
    while (!text.empty() && text.back() == ' ') text.pop_back();
    os << text << '\n';
  }
  doc.text = os.str();
  return doc;
}

void write_report(const std::filesystem::path& json_path, const ReportDocument& doc) {
  if (json_path.has_parent_path()) std::filesystem::create_directories(json_path.parent_path());
  std::ofstream json(json_path);
  if (!json) throw std::runtime_error("cannot write " + json_path.string());
  json << doc.json.dump(2) << '\n';
  auto text_path = json_path;
  text_path.replace_extension(".txt");
  std::ofstream text(text_path);
  text << doc.text;
}

}  // namespace aeroreact::eval
