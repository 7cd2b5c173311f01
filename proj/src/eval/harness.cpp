#include "aeroreact/eval/harness.hpp"

#include "aeroreact/tools/vision.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace aeroreact::eval {

Json TaskRun::to_json() const { return {{"task", task_id}, {"elapsed", elapsed}, {"run", run.to_json()}}; }

TaskRun TaskRun::from_json(const Json& j) {
  TaskRun r;
  r.task_id = j.at("task").get<std::string>();
  r.elapsed = j.value("elapsed", 0.0);
  r.run = agents::RunResult::from_json(j.at("run"));
  return r;
}

TaskRun run_task(const TaskSpec& task, tools::Method method, llm::Backend& backend, const tools::Scene& scene,
                 const HarnessOptions& options) {
  sim::Fleet fleet(options.n_drones, options.spacing);
  for (const auto& s : task.setup) fleet.apply(s.drone_id, s.command);

  tools::ScriptedVision vision(scene);
  tools::CaptureLog captures;
  tools::World world{fleet, scene, vision, captures};
  agents::HeadAgent head(backend, world, options.agent);

  TaskRun out;
  out.task_id = task.id;
  const auto start = std::chrono::steady_clock::now();
  out.run = head.execute(task.prompt, method, task.id);
  out.elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

SweepResult run_sweep(const std::vector<TaskSpec>& tasks, tools::Method method, llm::Backend& backend,
                      const tools::Scene& scene, const HarnessOptions& options) {
  SweepResult sweep;
  sweep.method = method;
  sweep.model = backend.model_name();
  for (const auto& task : tasks) {
    TaskRun run = run_task(task, method, backend, scene, options);
    sweep.scores.push_back(score_task(task, run.run, run.elapsed));
    sweep.runs.push_back(std::move(run));
  }
  return sweep;
}

void write_transcripts(const std::filesystem::path& dir, const TaskRun& run) {
  std::filesystem::create_directories(dir);
  {
    std::ofstream out(dir / (run.task_id + ".json"));
    if (!out) throw std::runtime_error("cannot write transcripts to " + dir.string());
    out << run.to_json().dump(2) << '\n';
  }
  for (const auto& [id, thread] : run.run.threads) {
    std::ofstream out(dir / (run.task_id + ".drone-" + std::to_string(id) + ".jsonl"));
    out << thread.to_jsonl();
  }
}

std::vector<TaskRun> read_transcripts(const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<TaskRun> runs;
  for (const auto& f : files) {
    std::ifstream in(f);
    std::stringstream buf;
    buf << in.rdbuf();
    runs.push_back(TaskRun::from_json(Json::parse(buf.str())));
  }
  return runs;
}

std::vector<TaskScore> score_runs(const std::vector<TaskSpec>& tasks, const std::vector<TaskRun>& runs) {
  std::vector<TaskScore> scores;
  for (const auto& task : tasks) {
    for (const auto& r : runs) {
      if (r.task_id == task.id) scores.push_back(score_task(task, r.run, r.elapsed));
    }
  }
  return scores;
}

}  // namespace aeroreact::eval
