// aeroreact: serve sessions over HTTP, run one request, benchmark the suite,
// or re-score stored transcripts.

#include "aeroreact/eval/harness.hpp"
#include "aeroreact/eval/report.hpp"
#include "aeroreact/service/server.hpp"
#include "aeroreact/tools/vision.hpp"

#include <CLI11.hpp>

#include <csignal>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using namespace aeroreact;

namespace {

service::Server* g_server = nullptr;

void on_signal(int) {
  if (g_server) g_server->stop();
}

std::vector<tools::Method> parse_methods(const std::string& list) {
  std::vector<tools::Method> out;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto m = tools::parse_method(item);
    if (!m) throw std::invalid_argument("unknown method '" + item + "' (expected reacteval, react or act)");
    out.push_back(*m);
  }
  return out;
}

tools::Scene load_scene(const std::string& path) { return path.empty() ? tools::Scene{} : tools::Scene::load(path); }

std::string default_scene_for(const fs::path& suite) {
  const auto candidate = suite.parent_path() / "scene.json";
  return fs::exists(candidate) ? candidate.string() : "";
}

void print_run(const agents::RunResult& run) {
  if (run.plan.ok()) {
    std::cout << "plan: " << run.plan.plan->to_json().dump() << '\n';
  } else {
    std::cout << "plan failed: " << run.plan.failure << '\n';
  }
  for (const auto& [id, thread] : run.threads) {
    std::cout << "drone " << id << ": " << thread.steps.size() << " step(s), "
              << (thread.complete ? "complete" : "incomplete");
    if (thread.abort_reason) std::cout << ", aborted: " << *thread.abort_reason;
    std::cout << '\n';
    for (const auto* a : thread.actions()) {
      std::cout << "  " << agents::describe_call(a->call) << " -> " << (a->result.success ? "ok" : "failed") << ": "
                << a->result.message << '\n';
    }
  }
  std::cout << "response: " << run.response << '\n';
}

int cmd_serve(const std::string& config_path, const std::string& host, int port, const std::string& data_dir) {
  service::ServiceConfig config = service::ServiceConfig::load(config_path);
  if (!host.empty()) config.host = host;
  if (port >= 0) config.port = port;
  if (!data_dir.empty()) config.data_dir = data_dir;
  service::SessionManager sessions(config.data_dir, config.session);
  service::Server server(sessions);
  const int bound = server.bind(config.host, config.port);
  if (bound < 0) {
    std::cerr << "cannot bind " << config.host << ':' << config.port << '\n';
    return 1;
  }
  g_server = &server;
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  std::cout << "listening on http://" << config.host << ':' << bound << " (data: " << config.data_dir.string() << ")"
            << std::endl;
  server.listen();
  g_server = nullptr;
  return 0;
}

struct RunOptions {
  std::string task;
  std::string method = "reacteval";
  std::string backend;
  std::string scene;
  int n_drones = 2;
  double spacing = 2.0;
  int max_iters = 20;
  std::string label = "run-1";
  std::string out;
};

int cmd_run(const RunOptions& o) {
  const auto method = tools::parse_method(o.method);
  if (!method) throw std::invalid_argument("unknown method '" + o.method + "'");
  const auto backend_config = llm::BackendConfig::from_spec(o.backend);
  if (auto problems = backend_config.validate(); !problems.empty()) throw service::ConfigError(problems);
  auto backend = llm::make_backend(backend_config);
  const tools::Scene scene = load_scene(o.scene);

  eval::TaskSpec task;
  task.id = o.label;
  task.prompt = o.task;
  eval::HarnessOptions options;
  options.n_drones = o.n_drones;
  options.spacing = o.spacing;
  options.agent.max_iters = o.max_iters;
  options.agent.max_retries = backend_config.max_retries;
  const eval::TaskRun run = eval::run_task(task, *method, *backend, scene, options);
  print_run(run.run);
  std::cout << "elapsed: " << run.elapsed << " s\n";
  if (!o.out.empty()) eval::write_transcripts(o.out, run);
  return 0;
}

int cmd_bench(const std::string& suite_path, const std::string& methods, const std::string& backend_spec,
              std::string scene_path, const std::string& out, const std::string& transcripts) {
  const auto suite = eval::load_suite(suite_path);
  for (const auto& w : suite.warnings) std::cerr << "warning: " << w << '\n';
  if (scene_path.empty()) scene_path = default_scene_for(suite_path);
  const tools::Scene scene = load_scene(scene_path);
  const auto backend_config = llm::BackendConfig::from_spec(backend_spec);
  if (auto problems = backend_config.validate(); !problems.empty()) throw service::ConfigError(problems);

  eval::HarnessOptions options;
  options.agent.max_retries = backend_config.max_retries;
  std::vector<eval::ReportRow> rows;
  for (const auto method : parse_methods(methods)) {
    // Fresh backend per sweep so scripted ordinals restart.
    auto backend = llm::make_backend(backend_config);
    const auto sweep = eval::run_sweep(suite.tasks, method, *backend, scene, options);
    if (!transcripts.empty()) {
      for (const auto& run : sweep.runs) {
        eval::write_transcripts(fs::path(transcripts) / std::string(tools::to_string(method)), run);
      }
    }
    rows.push_back(eval::aggregate(std::string(tools::to_string(method)), sweep.model, sweep.scores));
  }
  const auto doc = eval::make_report(rows);
  std::cout << doc.text;
  if (!out.empty()) eval::write_report(out, doc);
  return 0;
}

int cmd_score(const std::string& dir, const std::string& suite_path, const std::string& out,
              const std::string& model) {
  const auto suite = eval::load_suite(suite_path);
  for (const auto& w : suite.warnings) std::cerr << "warning: " << w << '\n';
  std::vector<eval::ReportRow> rows;
  std::vector<fs::path> method_dirs;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_directory()) method_dirs.push_back(entry.path());
  }
  std::sort(method_dirs.begin(), method_dirs.end());
  if (method_dirs.empty()) method_dirs.push_back(dir);
  for (const auto& d : method_dirs) {
    const auto runs = eval::read_transcripts(d);
    if (runs.empty()) continue;
    const std::string method(tools::to_string(runs.front().run.method));
    rows.push_back(eval::aggregate(method, model, eval::score_runs(suite.tasks, runs)));
  }
  if (rows.empty()) {
    std::cerr << "no transcripts found under " << dir << '\n';
    return 1;
  }
  const auto doc = eval::make_report(rows);
  std::cout << doc.text;
  if (!out.empty()) eval::write_report(out, doc);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hierarchical multi-agent drone control: sessions, runs and benchmarks"};
  app.require_subcommand(1);

  auto* serve = app.add_subcommand("serve", "Serve the session HTTP API");
  std::string config_path, host, data_dir;
  int port = -1;
  serve->add_option("--config", config_path, "Service config JSON")->required()->check(CLI::ExistingFile);
  serve->add_option("--host", host, "Override listen host");
  serve->add_option("--port", port, "Override listen port (0 picks a free port)");
  serve->add_option("--data-dir", data_dir, "Override data directory");

  auto* run = app.add_subcommand("run", "Execute one request on a fresh fleet");
  RunOptions ro;
  run->add_option("--task", ro.task, "User request")->required();
  run->add_option("--method", ro.method, "reacteval, react or act")->capture_default_str();
  run->add_option("--backend", ro.backend, "scripted:<path> or http:<model>@<endpoint>")->required();
  run->add_option("--scene", ro.scene, "Scene config JSON")->check(CLI::ExistingFile);
  run->add_option("--n-drones", ro.n_drones, "Fleet size")->capture_default_str()->check(CLI::PositiveNumber);
  run->add_option("--spacing", ro.spacing, "Start spacing along y (m)")->capture_default_str();
  run->add_option("--max-iters", ro.max_iters, "Worker iteration cap")->capture_default_str();
  run->add_option("--label", ro.label, "Run label used in thread ids")->capture_default_str();
  run->add_option("--out", ro.out, "Directory for transcripts");

  auto* bench = app.add_subcommand("bench", "Run method sweeps over a task suite");
  std::string suite_path, methods = "reacteval,react,act", backend_spec, scene_path, out, transcripts;
  bench->add_option("--suite", suite_path, "Suite JSON")->required()->check(CLI::ExistingFile);
  bench->add_option("--methods", methods, "Comma-separated methods")->capture_default_str();
  bench->add_option("--backend", backend_spec, "scripted:<path> or http:<model>@<endpoint>")->required();
  bench->add_option("--scene", scene_path, "Scene config JSON (default: scene.json next to the suite)");
  bench->add_option("--out", out, "report.json path (report.txt written alongside)");
  bench->add_option("--transcripts", transcripts, "Directory for per-task transcripts");

  auto* score = app.add_subcommand("score", "Score stored transcripts against a suite");
  std::string transcripts_dir, score_suite, score_out, model = "unknown";
  score->add_option("--transcripts", transcripts_dir, "Transcript directory")->required()->check(CLI::ExistingDirectory);
  score->add_option("--suite", score_suite, "Suite JSON")->required()->check(CLI::ExistingFile);
  score->add_option("--out", score_out, "report.json path");
  score->add_option("--model", model, "Model label for the report")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*serve) return cmd_serve(config_path, host, port, data_dir);
    if (*run) return cmd_run(ro);
    if (*bench) return cmd_bench(suite_path, methods, backend_spec, scene_path, out, transcripts);
    if (*score) return cmd_score(transcripts_dir, score_suite, score_out, model);
  } catch (const service::ConfigError& e) {
    for (const auto& p : e.problems()) std::cerr << "config: " << p << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
