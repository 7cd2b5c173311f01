#pragma once

#include "aeroreact/agents/head.hpp"
#include "aeroreact/eval/scoring.hpp"
#include "aeroreact/eval/suite.hpp"
#include "aeroreact/llm/backend.hpp"
#include "aeroreact/tools/scene.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace aeroreact::eval {

struct HarnessOptions {
  int n_drones = 2;
  double spacing = 2.0;
  agents::AgentOptions agent;
};

struct TaskRun {
  std::string task_id;
  agents::RunResult run;
  double elapsed = 0.0;  // seconds, planning through response

  Json to_json() const;
  static TaskRun from_json(const Json& j);
};

/// Runs one task on a fresh fleet (plus the task's setup commands). The run
/// label is the task id.
TaskRun run_task(const TaskSpec& task, tools::Method method, llm::Backend& backend, const tools::Scene& scene,
                 const HarnessOptions& options = {});

struct SweepResult {
  tools::Method method = tools::Method::reacteval;
  std::string model;
  std::vector<TaskRun> runs;
  std::vector<TaskScore> scores;
};

/// All tasks in suite order, sequentially, against one backend.
SweepResult run_sweep(const std::vector<TaskSpec>& tasks, tools::Method method, llm::Backend& backend,
                      const tools::Scene& scene, const HarnessOptions& options = {});

/// <dir>/<task>.json holds the run record; <dir>/<task>.drone-<id>.jsonl the
/// per-thread transcripts.
void write_transcripts(const std::filesystem::path& dir, const TaskRun& run);
std::vector<TaskRun> read_transcripts(const std::filesystem::path& dir);

/// Scores stored runs against a suite; runs for unknown tasks are skipped.
std::vector<TaskScore> score_runs(const std::vector<TaskSpec>& tasks, const std::vector<TaskRun>& runs);

}  // namespace aeroreact::eval
