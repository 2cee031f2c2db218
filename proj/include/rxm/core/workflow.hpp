#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace rxm {

inline constexpr std::string_view kToolLoad = "load_and_inspect_data";
inline constexpr std::string_view kToolPreprocess = "preprocess_data";
inline constexpr std::string_view kToolAnalyze = "analyze_data";
inline constexpr std::string_view kToolRecommend = "generate_recommendations";
inline constexpr std::string_view kToolSummarize = "summarize";

struct ToolInfo {
  std::string name;
  std::string description;

  bool operator==(const ToolInfo&) const = default;
};

// The five tools in their canonical execution order.
std::vector<ToolInfo> default_tool_registry();

enum class StepOutcome { kSucceeded, kFailed };

std::string_view to_string(StepOutcome outcome);

struct StepRecord {
  std::string tool_name;
  StepOutcome outcome = StepOutcome::kSucceeded;
  double duration_seconds = 0.0;
  std::string summary;
  std::optional<std::string> error;

  static StepRecord succeeded(std::string tool, std::string summary,
                              double duration_seconds = 0.0);
  static StepRecord failed(std::string tool, std::string error,
                           double duration_seconds = 0.0);

  bool operator==(const StepRecord&) const = default;
};

// Planner-visible state of one workflow run. Operations below return an
// updated copy; a context is owned by exactly one run.
struct WorkflowContext {
  std::string goal;
  std::vector<ToolInfo> available_tools;
  std::vector<StepRecord> step_history;
  std::size_t current_step_index = 0;
  std::vector<std::string> performance_insights;
  std::vector<std::string> lessons_learned;
  std::optional<std::string> error_context;
  std::size_t max_steps = 10;
  std::int64_t seed = 42;

  bool has_tool(std::string_view name) const;
  std::size_t succeeded_count() const;

  bool operator==(const WorkflowContext&) const = default;
};

WorkflowContext make_context(std::string goal, std::int64_t seed = 42,
                             std::size_t max_steps = 10);

// Throws Error(kUnknownTool) when record.tool_name is not registered and
// Error(kInvalidArgument) when a failed record carries no error text.
WorkflowContext record_step(WorkflowContext context, StepRecord record);

// Throws Error(kInvalidArgument) on an empty pattern.
WorkflowContext record_lesson(WorkflowContext context,
                              std::string failure_pattern);

WorkflowContext add_insight(WorkflowContext context, std::string insight);

// Populated by the workflow runner and rendered by the summary.
struct ModelSummary {
  std::string model_name;
  std::string metric_name;  // "accuracy", "r2" or "anomalies"
  double metric_value = 0.0;
  std::optional<std::size_t> anomaly_count;
  std::optional<std::size_t> sample_count;
};

struct WorkflowReport {
  std::string goal;
  std::string dataset_name;
  std::string problem_type;
  std::size_t feature_count = 0;
  double total_duration_seconds = 0.0;
  std::size_t steps_succeeded = 0;
  std::size_t steps_total = 0;
  std::optional<ModelSummary> model_summary;
  std::size_t feature_kept = 0;
  std::size_t feature_removed = 0;
  std::size_t recommendations_total = 0;
  // Ordered Critical, Elevated, Routine when rendered.
  std::map<std::string, std::size_t> priority_distribution;
  std::vector<std::string> hitl_outcomes;
};

// Fills goal and step counters from the context; the rest is left to the
// caller.
WorkflowReport report_from_context(const WorkflowContext& context);

}  // namespace rxm
