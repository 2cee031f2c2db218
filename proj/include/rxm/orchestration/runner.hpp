#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "rxm/analytics/analytics.hpp"
#include "rxm/core/clock.hpp"
#include "rxm/core/workflow.hpp"
#include "rxm/hitl/review.hpp"
#include "rxm/optimization/optimization.hpp"
#include "rxm/orchestration/backend.hpp"
#include "rxm/orchestration/planner.hpp"

namespace rxm::orchestration {

struct RunConfig {
  std::filesystem::path data_path;
  std::string goal = "Analyze the maintenance dataset and produce prioritized maintenance recommendations";
  std::optional<analytics::TaskKind> task;
  std::optional<std::string> target;
  std::optional<double> contamination;  // nullopt == auto
  std::uint64_t seed = 42;
  bool auto_approve = false;
  std::string model_name = "llama3";
  std::string slm_model_name = "llama3";
  double train_ratio = 0.8;
  TriggerConfig trigger;
  optimization::RecommendConfig recommend;
  // Artifacts (audit log, detailed results, recommendations) go here; an
  // empty path keeps everything in memory.
  std::filesystem::path log_dir = "logs";
};

struct RunIo {
  std::istream* in = nullptr;    // review and target prompts
  std::ostream* out = nullptr;   // review table and the summary
  std::ostream* log = nullptr;   // timestamped log lines
  Clock clock;                   // defaults to the system clock
};

struct RunResult {
  int exit_code = 0;  // 0 success, 1 load or unrecoverable failure, 2 review rejected
  WorkflowReport report;
  std::string summary;
  WorkflowContext context;
  std::optional<hitl::ReviewOutcome> review;
  std::optional<std::string> failure;
  nlohmann::json detailed_results;
  nlohmann::json recommendations;
  std::vector<hitl::AuditRecord> audit;
  std::optional<std::filesystem::path> detailed_results_path;
  std::optional<std::filesystem::path> recommendations_path;
  std::optional<std::filesystem::path> audit_path;
};

// Plan -> dispatch -> record until the planner finishes, max_steps is
// reached or loading fails. `planner` and `slm` may be null.
RunResult run_workflow(const RunConfig& config, Backend* planner, const RunIo& io,
                       Backend* slm = nullptr);

}  // namespace rxm::orchestration
