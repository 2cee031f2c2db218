#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "rxm/core/clock.hpp"
#include "rxm/core/error.hpp"
#include "rxm/hitl/audit.hpp"
#include "rxm/hitl/report.hpp"
#include "rxm/hitl/review.hpp"
#include "support.hpp"

using namespace rxm;
using namespace rxm::hitl;
using optimization::Priority;
using optimization::Recommendation;

namespace {

std::vector<Recommendation> sample_recs(std::size_t n) {
  std::vector<Recommendation> recs;
  for (std::size_t i = 0; i < n; ++i) {
    Recommendation r;
    r.machine_id = fmt::format("M{:03d}", i + 1);
    r.priority = i < n / 2 ? Priority::kCritical : Priority::kElevated;
    r.priority_score = 0.9 - 0.01 * static_cast<double>(i);
    r.action = "act";
    r.contributing_features = {{"Vibration", 0.4}};
    recs.push_back(r);
  }
  optimization::rank(recs);
  return recs;
}

WorkflowReport fig5_report() {
  WorkflowReport r;
  r.goal = "Analyze the maintenance dataset and produce prioritized maintenance recommendations";
  r.dataset_name = "smart_maintenance.csv";
  r.problem_type = "Classification";
  r.feature_count = 7;
  r.total_duration_seconds = 12.34;
  r.steps_succeeded = 5;
  r.steps_total = 5;
  r.model_summary = ModelSummary{"random_forest_clf", "accuracy", 0.9726, std::nullopt, std::nullopt};
  r.feature_kept = 7;
  r.feature_removed = 0;
  r.recommendations_total = 10;
  r.priority_distribution = {{"Critical", 4}, {"Elevated", 6}, {"Routine", 0}};
  r.hitl_outcomes = {"approved (action=10, unique_machines=10)"};
  return r;
}

std::string golden_path(const std::string& name) { return std::string(RXM_GOLDEN_DIR) + "/" + name; }

}  // namespace

TEST_SUITE("hitl") {

TEST_CASE("audit log round-trips through the JSON-lines file") {
  test::TempDir dir;
  const auto path = dir / "audit.jsonl";
  {
    AuditLog log(ticking_clock(test::reference_time(), std::chrono::milliseconds(5)), path);
    log.append(Actor::kOrchestrator, "planner_decision",
               {{"tool", "load_and_inspect_data"}, {"reason", "nothing loaded"}});
    log.append(Actor::kHuman, "review_outcome", {{"status", "approved"}});
    CHECK(log.size() == 2);
  }
  std::ifstream in(path);
  std::vector<nlohmann::json> lines;
  for (std::string line; std::getline(in, line);) lines.push_back(nlohmann::json::parse(line));
  REQUIRE(lines.size() == 2);
  CHECK(lines[0]["actor"] == "orchestrator");
  CHECK(lines[0]["payload"]["tool"] == "load_and_inspect_data");
  CHECK(lines[0]["payload"]["reason"] == "nothing loaded");
  CHECK(lines[0]["timestamp"] == "2025-11-13T21:41:21.537Z");
  CHECK(lines[1]["actor"] == "human");
  CHECK(lines[0]["timestamp"].get<std::string>() <= lines[1]["timestamp"].get<std::string>());
  for (const auto& l : lines) {
    for (const char* key : {"timestamp", "actor", "event", "payload"}) CHECK(l.contains(key));
  }
}

TEST_CASE("audit timestamps never decrease") {
  int calls = 0;
  Clock backwards = [&] { return test::reference_time() - std::chrono::seconds(calls++); };
  AuditLog log(backwards);
  for (int i = 0; i < 5; ++i) log.append(Actor::kAnalytics, "tick");
  const auto recs = log.records();
  for (std::size_t i = 1; i < recs.size(); ++i) CHECK(recs[i - 1].timestamp <= recs[i].timestamp);
}

TEST_CASE("unwritable sink") {
  const std::filesystem::path bad = "/proc/definitely/not/here/audit.jsonl";
  try {
    AuditLog log(fixed_clock(test::reference_time()), bad);
    log.append(Actor::kHuman, "x");
    FAIL("expected SinkUnwritable");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kSinkUnwritable);
  }
  AuditLog tolerant(fixed_clock(test::reference_time()), bad, SinkPolicy::kWarnAndKeep);
  tolerant.append(Actor::kHuman, "x");
  CHECK(tolerant.size() == 1);
  CHECK(tolerant.sink_failure().has_value());
}

TEST_CASE("review: approve, reject, auto-approve and end of input") {
  AuditLog audit(fixed_clock(test::reference_time()));
  std::ostringstream out;
  std::istringstream approve("a\n");
  auto o = review(sample_recs(10), approve, out, ReviewMode::kInteractive, audit);
  CHECK(o.status == ReviewStatus::kApproved);
  CHECK(describe(o) == "approved (action=10, unique_machines=10)");
  CHECK(o.approved.size() == 10);
  CHECK(out.str().find("[a]pprove") != std::string::npos);
  CHECK(out.str().find("M001") != std::string::npos);

  std::istringstream reject("maybe\nr\n");
  o = review(sample_recs(4), reject, out, ReviewMode::kInteractive, audit);
  CHECK(o.status == ReviewStatus::kRejected);
  CHECK(o.approved.empty());
  CHECK(o.actions_count == 4);

  std::ostringstream silent;
  std::istringstream nothing;
  o = review(sample_recs(3), nothing, silent, ReviewMode::kAutoApprove, audit);
  CHECK(o.status == ReviewStatus::kApproved);
  CHECK(silent.str().empty());

  std::istringstream eof;
  o = review(sample_recs(3), eof, out, ReviewMode::kInteractive, audit);
  CHECK(o.status == ReviewStatus::kRejected);
  CHECK(o.input_aborted);

  std::size_t human = 0;
  for (const auto& r : audit.records()) human += r.actor == Actor::kHuman ? 1 : 0;
  CHECK(human == audit.size());
  CHECK(human >= 7);
}

TEST_CASE("review: adjustments re-price and re-rank, scores are refused") {
  AuditLog audit(fixed_clock(test::reference_time()));
  std::ostringstream out;
  std::istringstream in("d\n4 priority Critical\n1 score 9\n2 action Replace bearing\n99 priority Low\ndone\n");
  const auto o = review(sample_recs(4), in, out, ReviewMode::kInteractive, audit);
  CHECK(o.status == ReviewStatus::kAdjusted);
  REQUIRE(o.adjustments.size() == 2);
  CHECK(o.adjustments[0].machine_id == "M004");
  CHECK(o.adjustments[0].field == "priority");
  CHECK(o.adjustments[0].new_value == "Critical");
  CHECK(o.adjustments[1].new_value == "Replace bearing");
  CHECK(out.str().find("edit the priority or the action instead") != std::string::npos);
  const auto m004 = std::find_if(o.approved.begin(), o.approved.end(),
                                 [](const auto& r) { return r.machine_id == "M004"; });
  REQUIRE(m004 != o.approved.end());
  CHECK(m004->priority == Priority::kCritical);
  CHECK(m004->cost_estimate == 1000.0);
  for (std::size_t i = 1; i < o.approved.size(); ++i) {
    CHECK_FALSE(optimization::ranks_before(o.approved[i], o.approved[i - 1]));
  }
  bool refused = false;
  for (const auto& r : audit.records()) refused |= r.event == "score_edit_refused";
  CHECK(refused);
}

TEST_CASE("metric formatting") {
  CHECK(format_metric(0.9726) == "0.9726 (97.26%)");
  CHECK(format_metric(1.0) == "1.0000 (100.00%)");
  CHECK(format_metric(0.0) == "0.0000 (0.00%)");
}

TEST_CASE("summary matches the golden file") {
  const std::string text = render_summary(fig5_report());
  const std::string path = golden_path("summary_classification.txt");
  if (std::getenv("RXM_UPDATE_GOLDEN") != nullptr) test::write_file(path, text);
  CHECK(text == test::read_file(path));

  const char* sections[] = {"MODEL PERFORMANCE SUMMARY", "FEATURE ANALYSIS RECAP", "RECOMMENDATION SUMMARY",
                            "WORKFLOW COMPLETION RECAP", "HITL INTERACTIONS"};
  std::size_t last = 0;
  for (const char* s : sections) {
    const auto pos = text.find(s);
    REQUIRE(pos != std::string::npos);
    CHECK(pos > last);
    last = pos;
  }
  CHECK(text.find("accuracy: 0.9726 (97.26%)") != std::string::npos);
  CHECK(text.find("Steps: 5/5 succeeded (100.0%)") != std::string::npos);
  CHECK(text.find("Total Recommendations: 10") != std::string::npos);
  CHECK(text.find("approved (action=10, unique_machines=10)") != std::string::npos);
}

TEST_CASE("summary: empty recommendations and anomaly runs") {
  auto r = fig5_report();
  r.recommendations_total = 0;
  r.priority_distribution.clear();
  r.model_summary = ModelSummary{"isolation_forest", "anomalies", 0.0, 1000, 100000};
  r.problem_type = "Anomaly Detection";
  const std::string text = render_summary(r);
  CHECK(text.find("Total Recommendations: 0") != std::string::npos);
  CHECK(text.find("Critical") == std::string::npos);
  CHECK(text.find("1000") != std::string::npos);
  CHECK(text == render_summary(r));
  const std::string path = golden_path("summary_anomaly.txt");
  if (std::getenv("RXM_UPDATE_GOLDEN") != nullptr) test::write_file(path, text);
  CHECK(text == test::read_file(path));
}

TEST_CASE("json artifacts: sorted keys, timestamped name, unwritable dir") {
  test::TempDir dir;
  const nlohmann::json doc = {{"zeta", 1}, {"alpha", {{"b", 2}, {"a", 1}}}};
  const auto path = write_json_artifact(doc, dir.path(), "detailed_results", test::reference_time());
  CHECK(path.filename() == "detailed_results_20251113_214121.json");
  const std::string text = test::read_file(path.string());
  CHECK(text == doc.dump(2) + "\n");
  CHECK(text.find("\"alpha\"") < text.find("\"zeta\""));
  CHECK(emit_detailed_results(doc, dir.path(), fixed_clock(test::reference_time())) == path);
  try {
    (void)write_json_artifact(doc, "/proc/not/a/dir", "x", test::reference_time());
    FAIL("expected SinkUnwritable");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kSinkUnwritable);
  }
}

}  // TEST_SUITE
