#include "aeroreact/eval/harness.hpp"
#include "aeroreact/eval/report.hpp"
#include "aeroreact/tools/vision.hpp"

#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <random>

using namespace aeroreact;
using namespace aeroreact::eval;
namespace fs = std::filesystem;

namespace {

const tools::Scene& bundled_scene() {
  static const tools::Scene scene = tools::Scene::load(AERO_DATA_DIR "/scene.json");
  return scene;
}

const SuiteLoad& bundled_suite() {
  static const SuiteLoad suite = load_suite(AERO_DATA_DIR "/suite.json");
  return suite;
}

const TaskSpec& task_named(const std::string& id) {
  for (const auto& t : bundled_suite().tasks) {
    if (t.id == id) return t;
  }
  FAIL("no task " << id);
  throw std::logic_error("unreachable");
}

// Builds a run by executing tool calls against a real fleet, so recorded
// states are what the simulator produced.
struct RunBuilder {
  sim::Fleet fleet{2, 2.0};
  tools::ScriptedVision vision{bundled_scene()};
  tools::CaptureLog captures;
  tools::World world{fleet, bundled_scene(), vision, captures};
  agents::RunResult run;

  explicit RunBuilder(std::map<int, bool> plan_end_flags) {
    agents::HeadPlan plan;
    for (const auto& [id, end] : plan_end_flags) {
      plan.per_drone[id] = {"p", "o", end};
      if (!end) {
        run.threads[id].drone_id = id;
      }
    }
    run.plan.plan = plan;
  }

  RunBuilder& act(int drone, const std::string& tool, Json params = Json::object()) {
    agents::ActionRecord rec;
    rec.call = {tool, std::move(params), drone};
    rec.result = tools::invoke(rec.call, tools::Method::act, world);
    rec.state_after = fleet.drone(drone);
    auto& t = run.threads[drone];
    agents::Step step;
    step.action = rec;
    t.steps.push_back(step);
    t.iteration = static_cast<int>(t.steps.size());
    return *this;
  }
  RunBuilder& complete(int drone) {
    run.threads[drone].complete = true;
    return *this;
  }
  RunBuilder& respond(std::string text) {
    run.response = std::move(text);
    return *this;
  }
};

Json move(const std::string& dir, double d) { return {{"direction", dir}, {"distance", d}}; }

agents::ActionRecord record(const std::string& tool, Json params, bool success) {
  agents::ActionRecord a;
  a.call = {tool, std::move(params), 1};
  a.result.tool_name = tool;
  a.result.success = success;
  return a;
}

std::shared_ptr<const llm::Script> perfect_script() {
  static auto s = std::make_shared<const llm::Script>(llm::Script::load(AERO_DATA_DIR "/perfect_script.jsonl"));
  return s;
}

}  // namespace

TEST_CASE("bundled suite reproduces the per-complexity maxima") {
  const auto& suite = bundled_suite();
  CHECK(suite.warnings.empty());
  CHECK(suite.tasks.size() == 16);
  CHECK(suite.totals == kSuiteTotals);
  CHECK(suite.counts == std::array<int, 3>{8, 5, 3});
  int total = 0;
  for (const auto& t : suite.tasks) total += t.max_points;
  CHECK(total == 63);
  CHECK(task_named("easy-1").max_points == 0);
  CHECK(task_named("hard-2").max_points == 5);
  CHECK(task_named("medium-1").setup.size() == 2);
}

TEST_CASE("suite parsing reports problems") {
  SuiteLoad empty = parse_suite(Json::parse(R"({"tasks": []})"));
  CHECK(empty.tasks.empty());
  CHECK_FALSE(empty.warnings.empty());

  const Json one = Json::parse(
      R"({"tasks": [{"id": "a", "complexity": "easy", "prompt": "x", "expected": {"1": [{"tool": "takeoff"}]}}]})");
  const SuiteLoad partial = parse_suite(one);
  CHECK(partial.totals == std::array<int, 3>{1, 0, 0});
  REQUIRE_FALSE(partial.warnings.empty());
  CHECK(partial.warnings.front().find("14") != std::string::npos);

  Json dup = one;
  dup["tasks"].push_back(one["tasks"][0]);
  CHECK_THROWS(parse_suite(dup));
  CHECK_THROWS(parse_suite(Json::parse(R"({"tasks": [{"id": "a", "complexity": "extreme", "prompt": "x"}]})")));
  CHECK_THROWS(Predicate::from_json(Json::parse(R"({"type": "teleported"})")));

  for (const auto& t : bundled_suite().tasks) CHECK(TaskSpec::from_json(t.to_json()).to_json() == t.to_json());
}

TEST_CASE("expected action matchers") {
  ExpectedAction rotate{"rotate", {{"angle", {{"abs", 180}}}}, 1};
  CHECK(rotate.matches({"rotate", {{"angle", -180}}, 1}));
  CHECK(rotate.matches({"rotate", {{"angle", 180.0000001}}, 1}));
  CHECK_FALSE(rotate.matches({"rotate", {{"angle", 90}}, 1}));
  ExpectedAction any{"move", {{"direction", "forward"}, {"distance", "*"}}, 1};
  CHECK(any.matches({"move", move("forward", 7), 1}));
  CHECK_FALSE(any.matches({"move", move("backward", 7), 1}));
  CHECK_FALSE(any.matches({"rotate", {{"angle", 7}}, 1}));
  ExpectedAction bare{"takeoff", Json::object(), 1};
  CHECK(bare.matches({"takeoff", Json::object(), 1}));
}

TEST_CASE("two drones taking off score two of two") {
  const TaskSpec& task = task_named("easy-2");
  RunBuilder b({{1, false}, {2, false}});
  b.act(1, "takeoff").complete(1).act(2, "takeoff").complete(2);
  const TaskScore s = score_task(task, b.run, 0.0);
  CHECK(s.points == 2);
  CHECK(s.max_points == 2);
  CHECK_FALSE(s.failure);
}

TEST_CASE("a wrong call freezes the drone's score") {
  TaskSpec task;
  task.id = "t";
  task.expected[1] = {{"takeoff", Json::object(), 1}, {"move", move("forward", 2), 1}, {"capture_image", Json::object(), 1}};
  task.max_points = 3;
  RunBuilder b({{1, false}});
  b.act(1, "takeoff").act(1, "move", move("forward", 2)).act(1, "move", move("forward", 1)).act(1, "capture_image");
  b.complete(1);
  const TaskScore s = score_task(task, b.run, 0.0);
  CHECK(s.points == 2);
  CHECK(s.failure == FailureMode::incorrect_function_calls);
}

TEST_CASE("a failed call does not count and freezes the score") {
  const TaskSpec& task = task_named("easy-3");
  RunBuilder b({{1, false}});
  // Moving while landed fails in the simulator; the later calls do not help.
  b.act(1, "move", move("forward", 2)).act(1, "takeoff").act(1, "move", move("forward", 2)).complete(1);
  const TaskScore s = score_task(task, b.run, 0.0);
  CHECK(s.points == 0);
  CHECK(s.failure == FailureMode::incorrect_function_calls);
}

TEST_CASE("gauge run that stops before analysing is early stopping") {
  const TaskSpec& task = task_named("hard-2");
  RunBuilder b({{1, true}, {2, false}});
  b.act(2, "takeoff")
      .act(2, "move", move("up", 5))
      .act(2, "move", move("forward", 16))
      .act(2, "move", move("right", 4))
      .act(2, "capture_image")
      .complete(2)
      .respond("Drone 2 reached the gauge and captured an image.");
  CHECK(b.fleet.drone(2).x == 4.0);
  CHECK(b.fleet.drone(2).y == 18.0);
  CHECK(b.fleet.drone(2).z == 6.0);
  const TaskScore s = score_task(task, b.run, 0.0);
  CHECK(s.subtasks == std::vector<bool>{true, true, true, false, false});
  CHECK(s.points == 3);
  CHECK(s.failure == FailureMode::early_stopping);

  // Finishing the job earns the rest.
  // At the gauge itself nothing is in front, so back off one metre to see it.
  b.act(2, "move", move("backward", 1)).act(2, "capture_image").act(2, "analyze_gauges");
  b.respond("The gauge reads 120 psi.");
  const TaskScore full = score_task(task, b.run, 0.0);
  CHECK(full.points == 5);
  CHECK_FALSE(full.failure);
}

TEST_CASE("plan that idles a required drone is a head agent failure") {
  const TaskSpec& task = task_named("easy-2");
  RunBuilder b({{1, false}, {2, true}});
  b.act(1, "takeoff").complete(1);
  const TaskScore s = score_task(task, b.run, 0.0);
  CHECK(s.points == 1);
  CHECK(s.failure == FailureMode::head_agent_failure);

  RunBuilder failed({});
  failed.run.plan = {};
  failed.run.plan.failure = "no JSON object found";
  CHECK(score_task(task, failed.run, 0.0).failure == FailureMode::head_agent_failure);
}

TEST_CASE("an aborted thread is not early stopping") {
  const TaskSpec& task = task_named("easy-3");
  RunBuilder b({{1, false}});
  b.act(1, "takeoff");
  b.run.threads[1].abort_reason = "connection reset";
  CHECK(score_task(task, b.run, 0.0).failure == FailureMode::incorrect_function_calls);
  b.run.threads[1].abort_reason.reset();
  b.complete(1);
  CHECK(score_task(task, b.run, 0.0).failure == FailureMode::early_stopping);
}

TEST_CASE("zero-point tasks never fail") {
  RunBuilder b({{1, true}, {2, true}});
  b.respond("I coordinate two drones.");
  b.run.threads.clear();
  const TaskScore s = score_task(task_named("easy-1"), b.run, 0.0);
  CHECK(s.points == 0);
  CHECK_FALSE(s.failure);
}

TEST_CASE("terminate is ignored by scoring") {
  const TaskSpec& task = task_named("easy-3");
  RunBuilder b({{1, false}});
  b.act(1, "takeoff").act(1, "terminate").act(1, "move", move("forward", 2));
  CHECK(executed_actions(b.run).at(1).size() == 2);
  CHECK(score_task(task, b.run, 0.0).points == 2);
}

TEST_CASE("prefix scoring matches a brute-force oracle") {
  std::mt19937 rng(99);
  const std::vector<std::pair<std::string, Json>> alphabet = {
      {"takeoff", Json::object()}, {"land", Json::object()}, {"move", move("forward", 2)},
      {"move", move("left", 2)},   {"rotate", {{"angle", 90}}}, {"terminate", Json::object()}};
  std::uniform_int_distribution<size_t> pick(0, alphabet.size() - 2), pick_any(0, alphabet.size() - 1);
  std::uniform_int_distribution<int> len(0, 6);
  std::bernoulli_distribution fails(0.15), copy(0.7);

  for (int trial = 0; trial < 200; ++trial) {
    std::vector<ExpectedAction> expected;
    for (int i = len(rng); i > 0; --i) {
      const auto& [tool, params] = alphabet[pick(rng)];
      expected.push_back({tool, params, 1});
    }
    // Executed calls mostly follow the expected sequence with noise.
    std::vector<agents::ActionRecord> executed;
    const int n = len(rng) + 1;
    for (int i = 0; i < n; ++i) {
      if (i < static_cast<int>(expected.size()) && copy(rng)) {
        executed.push_back(record(expected[i].tool, expected[i].params, !fails(rng)));
      } else {
        const auto& [tool, params] = alphabet[pick_any(rng)];
        executed.push_back(record(tool, params, !fails(rng)));
      }
    }

    std::vector<agents::ActionRecord> filtered;
    for (const auto& a : executed) {
      if (a.call.tool_name != "terminate") filtered.push_back(a);
    }
    int oracle = 0;
    while (oracle < static_cast<int>(filtered.size()) && oracle < static_cast<int>(expected.size())) {
      const auto& a = filtered[oracle];
      const auto& e = expected[oracle];
      if (!a.result.success || a.call.tool_name != e.tool || a.call.parameters != e.params) break;
      ++oracle;
    }
    CAPTURE(trial);
    CHECK(score_drone(executed, expected) == oracle);
    CHECK(score_drone(executed, expected) <= static_cast<int>(expected.size()));

    // Appending calls never lowers a score.
    auto longer = executed;
    longer.push_back(record(alphabet[pick_any(rng)].first, alphabet[0].second, true));
    CHECK(score_drone(longer, expected) >= score_drone(executed, expected));

    // Per-drone scores add up.
    ExecutedActions both{{1, executed}, {2, longer}};
    std::map<int, std::vector<ExpectedAction>> exp2{{1, expected}, {2, expected}};
    const auto seq = score_sequential(both, exp2);
    CHECK(seq.points == score_drone(executed, expected) + score_drone(longer, expected));
    CHECK(seq.per_drone.at(2) == score_drone(longer, expected));
  }
}

TEST_CASE("predicates agree with direct geometry") {
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> coord(-2, 8), hdg(0, 360);
  Predicate left{"captured_from_side", 1, {{"point", {3, 4, 5}}, {"side", "left"}}, ""};
  Predicate right{"captured_from_side", 1, {{"point", {3, 4, 5}}, {"side", "right"}}, ""};
  Predicate near{"captured_near", 1, {{"point", {3, 4}}, {"tolerance", 2.0}, {"facing", true}}, ""};
  for (int i = 0; i < 300; ++i) {
    agents::ActionRecord a = record("capture_image", Json::object(), true);
    a.state_after.x = coord(rng);
    a.state_after.y = coord(rng);
    a.state_after.heading = hdg(rng);
    a.state_after.is_flying = true;
    agents::RunResult run;
    agents::Step step;
    step.action = a;
    run.threads[1].steps.push_back(step);

    const double r = a.state_after.heading * M_PI / 180.0;
    const double ahead = std::sin(r) * (3 - a.state_after.x) + std::cos(r) * (4 - a.state_after.y);
    const bool faces = ahead > 1e-9;
    CHECK(predicate_satisfied(left, run) == (faces && a.state_after.x < 3));
    CHECK(predicate_satisfied(right, run) == (faces && a.state_after.x > 3));
    CHECK(predicate_satisfied(near, run) ==
          (faces && std::hypot(a.state_after.x - 3, a.state_after.y - 4) <= 2.0));
    Predicate other = left;
    other.drone = 2;
    CHECK_FALSE(predicate_satisfied(other, run));
  }
}

TEST_CASE("response predicate is case-insensitive") {
  agents::RunResult run;
  run.response = "Gauge READS 120 PSI";
  CHECK(predicate_satisfied({"response_mentions", std::nullopt, {{"text", "reads 120"}}, ""}, run));
  CHECK_FALSE(predicate_satisfied({"response_mentions", std::nullopt, {{"text", "130"}}, ""}, run));
}

TEST_CASE("overall is total points over 63") {
  struct Row {
    std::array<int, 3> points;
    const char* expected;
  };
  const Row rows[] = {{{13, 34, 10}, "0.905"}, {{14, 13, 2}, "0.460"}, {{13, 34, 4}, "0.810"},
                      {{14, 34, 6}, "0.857"},  {{14, 18, 2}, "0.540"}, {{13, 30, 2}, "0.714"},
                      {{14, 29, 4}, "0.746"},  {{14, 32, 6}, "0.825"}, {{14, 21, 1}, "0.571"},
                      {{13, 30, 4}, "0.746"},  {{14, 33, 3}, "0.794"}, {{13, 32, 5}, "0.794"}};
  for (const auto& r : rows) {
    const ReportRow row = row_from_fractions("m", "x", r.points, kSuiteTotals);
    char oracle[16];
    std::snprintf(oracle, sizeof oracle, "%.3f", (r.points[0] + r.points[1] + r.points[2]) / 63.0);
    CHECK(format_overall(row.overall()) == oracle);
    CHECK(format_overall(row.overall()) == r.expected);
  }
  CHECK(format_overall(1.0) == "1.000");
}

TEST_CASE("perfect scripted answers score full marks for every method") {
  for (const auto method : {tools::Method::reacteval, tools::Method::react, tools::Method::act}) {
    CAPTURE(tools::to_string(method));
    llm::ScriptedBackend backend(perfect_script());
    const SweepResult sweep = run_sweep(bundled_suite().tasks, method, backend, bundled_scene());
    REQUIRE(sweep.scores.size() == 16);
    for (const auto& s : sweep.scores) {
      CAPTURE(s.task_id);
      CHECK(s.points == s.max_points);
      CHECK_FALSE(s.failure);
    }
    const ReportRow row = aggregate(std::string(tools::to_string(method)), sweep.model, sweep.scores);
    CHECK(row.points == kSuiteTotals);
    CHECK(row.max_points == kSuiteTotals);
    CHECK(format_overall(row.overall()) == "1.000");
    CHECK(row.failures == std::array<int, 3>{0, 0, 0});
  }
}

TEST_CASE("setup commands run before the task") {
  llm::ScriptedBackend backend(perfect_script());
  const TaskRun run = run_task(task_named("medium-1"), tools::Method::reacteval, backend, bundled_scene());
  const auto actions = run.run.threads.at(1).actions();
  REQUIRE_FALSE(actions.empty());
  CHECK(actions.front()->call.tool_name == "move");
  CHECK(actions.front()->result.success);
}

TEST_CASE("sweeps are deterministic and transcripts re-score identically") {
  auto sweep = [] {
    llm::ScriptedBackend backend(perfect_script());
    return run_sweep(bundled_suite().tasks, tools::Method::react, backend, bundled_scene());
  };
  const SweepResult a = sweep();
  const SweepResult b = sweep();
  for (size_t i = 0; i < a.runs.size(); ++i) {
    CHECK(a.runs[i].run.to_json() == b.runs[i].run.to_json());
    CHECK(a.scores[i].points == b.scores[i].points);
  }

  const fs::path dir = fs::temp_directory_path() / ("aeroreact-eval-" + std::to_string(::getpid()));
  fs::remove_all(dir);
  for (const auto& run : a.runs) write_transcripts(dir, run);
  CHECK(fs::exists(dir / "medium-3.json"));
  CHECK(fs::exists(dir / "medium-3.drone-1.jsonl"));
  const auto back = read_transcripts(dir);
  REQUIRE(back.size() == a.runs.size());
  const auto rescored = score_runs(bundled_suite().tasks, back);
  REQUIRE(rescored.size() == a.scores.size());
  for (size_t i = 0; i < rescored.size(); ++i) {
    CHECK(rescored[i].task_id == a.scores[i].task_id);
    CHECK(rescored[i].points == a.scores[i].points);
    CHECK(rescored[i].failure == a.scores[i].failure);
  }
  fs::remove_all(dir);
}

TEST_CASE("report document") {
  std::vector<TaskScore> scores;
  for (const auto& t : bundled_suite().tasks) {
    TaskScore s;
    s.task_id = t.id;
    s.complexity = t.complexity;
    s.max_points = t.max_points;
    s.points = t.id == "hard-2" ? 3 : t.max_points;
    s.failure = t.id == "hard-2" ? std::optional(FailureMode::early_stopping) : std::nullopt;
    s.elapsed = t.complexity == Complexity::hard ? 2.0 : 1.0;
    scores.push_back(s);
  }
  const ReportRow row = aggregate("reacteval", "o4-mini", scores);
  CHECK(row.points == std::array<int, 3>{14, 36, 11});
  CHECK(row.failures == std::array<int, 3>{0, 1, 0});
  CHECK(row.mean_elapsed[2] == doctest::Approx(2.0));
  CHECK(format_overall(row.overall()) == "0.968");

  const auto doc = make_report({row, row_from_fractions("act", "gpt-4.1", {13, 30, 4}, kSuiteTotals)});
  CHECK(doc.text.find("Overall") != std::string::npos);
  CHECK(doc.text.find("0.968") != std::string::npos);
  CHECK(doc.text.find("11/13") != std::string::npos);
  CHECK(doc.text.find("0.746") != std::string::npos);
  REQUIRE(doc.json["rows"].size() == 2);
  CHECK(doc.json["rows"][0]["method"] == "reacteval");
  CHECK_THROWS(make_report({}));

  const fs::path dir = fs::temp_directory_path() / ("aeroreact-report-" + std::to_string(::getpid()));
  fs::remove_all(dir);
  fs::create_directories(dir);
  write_report(dir / "report.json", doc);
  CHECK(fs::exists(dir / "report.json"));
  CHECK(fs::exists(dir / "report.txt"));
  fs::remove_all(dir);

  for (const auto& s : scores) {
    const TaskScore back = TaskScore::from_json(s.to_json());
    CHECK(back.to_json() == s.to_json());
  }
}
