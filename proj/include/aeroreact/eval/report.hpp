#pragma once

#include "aeroreact/eval/scoring.hpp"

#include <array>
#include <filesystem>
#include <string>
#include <vector>

namespace aeroreact::eval {

/// One method x model line of the results table.
struct ReportRow {
  std::string method;
  std::string model;
  std::array<int, 3> points{};
  std::array<int, 3> max_points{};
  std::array<double, 3> mean_elapsed{};  // seconds per task
  std::array<int, 3> failures{};         // indexed by FailureMode
  std::vector<TaskScore> tasks;

  /// Total points over total maxima (63 for the bundled suite).
  double overall() const;
  Json to_json() const;
};

ReportRow aggregate(const std::string& method, const std::string& model, const std::vector<TaskScore>& scores);

/// Row built from bare per-complexity point counts.
ReportRow row_from_fractions(const std::string& method, const std::string& model, std::array<int, 3> points,
                             std::array<int, 3> max_points);

/// "0.905"
std::string format_overall(double overall);

struct ReportDocument {
  Json json;
  std::string text;
};

ReportDocument make_report(const std::vector<ReportRow>& rows);

/// Writes `json_path` and the text table next to it with a .txt extension.
void write_report(const std::filesystem::path& json_path, const ReportDocument& doc);

}  // namespace aeroreact::eval
