#include "rxm/core/workflow.hpp"

#include <algorithm>
#include <utility>

#include "rxm/core/error.hpp"

namespace rxm {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kUnknownTool: return "UnknownTool";
    case ErrorCode::kFileNotFound: return "FileNotFound";
    case ErrorCode::kMalformedCsv: return "MalformedCsv";
    case ErrorCode::kEmptyFrame: return "EmptyFrame";
    case ErrorCode::kAmbiguousTarget: return "AmbiguousTarget";
    case ErrorCode::kNoFeatures: return "NoFeatures";
    case ErrorCode::kEmptyTrainSet: return "EmptyTrainSet";
    case ErrorCode::kMissingColumn: return "MissingColumn";
    case ErrorCode::kTooFewSamples: return "TooFewSamples";
    case ErrorCode::kClassTooSmall: return "ClassTooSmall";
    case ErrorCode::kAllModelsFailed: return "AllModelsFailed";
    case ErrorCode::kDegenerateStd: return "DegenerateStd";
    case ErrorCode::kMissingImportances: return "MissingImportances";
    case ErrorCode::kInputAborted: return "InputAborted";
    case ErrorCode::kSinkUnwritable: return "SinkUnwritable";
    case ErrorCode::kDataLoadFailure: return "DataLoadFailure";
    case ErrorCode::kMaxStepsExceeded: return "MaxStepsExceeded";
    case ErrorCode::kBackendFailure: return "BackendFailure";
  }
  return "Unknown";
}

std::vector<ToolInfo> default_tool_registry() {
  return {
      {std::string(kToolLoad),
       "Load the CSV dataset, profile its columns and report data-quality "
       "issues."},
      {std::string(kToolPreprocess),
       "Discover column roles, analyze features, choose imputation/scaling/"
       "encoding and fit a leakage-safe pipeline."},
      {std::string(kToolAnalyze),
       "Infer the task, train candidate models on an 80/20 split and search "
       "alternatives when performance is low."},
      {std::string(kToolRecommend),
       "Turn model outputs into ranked maintenance recommendations with cost "
       "and time estimates."},
      {std::string(kToolSummarize),
       "Run the human review gate and produce the final summary report."},
  };
}

std::string_view to_string(StepOutcome outcome) {
  return outcome == StepOutcome::kSucceeded ? "succeeded" : "failed";
}

StepRecord StepRecord::succeeded(std::string tool, std::string summary,
                                 double duration_seconds) {
  return StepRecord{std::move(tool), StepOutcome::kSucceeded, duration_seconds,
                    std::move(summary), std::nullopt};
}

StepRecord StepRecord::failed(std::string tool, std::string error,
                              double duration_seconds) {
  std::string summary = "failed: " + error;
  return StepRecord{std::move(tool), StepOutcome::kFailed, duration_seconds,
                    std::move(summary), std::move(error)};
}

bool WorkflowContext::has_tool(std::string_view name) const {
  return std::any_of(available_tools.begin(), available_tools.end(),
                     [&](const ToolInfo& t) { return t.name == name; });
}

std::size_t WorkflowContext::succeeded_count() const {
  return static_cast<std::size_t>(
      std::count_if(step_history.begin(), step_history.end(),
                    [](const StepRecord& r) {
                      return r.outcome == StepOutcome::kSucceeded;
                    }));
}

WorkflowContext make_context(std::string goal, std::int64_t seed,
                             std::size_t max_steps) {
  WorkflowContext context;
  context.goal = std::move(goal);
  context.available_tools = default_tool_registry();
  context.seed = seed;
  context.max_steps = max_steps;
  return context;
}

WorkflowContext record_step(WorkflowContext context, StepRecord record) {
  if (!context.has_tool(record.tool_name)) {
    throw Error(ErrorCode::kUnknownTool,
                "unknown tool '" + record.tool_name + "'");
  }
  if (record.outcome == StepOutcome::kFailed && !record.error) {
    throw Error(ErrorCode::kInvalidArgument,
                "failed step '" + record.tool_name + "' carries no error");
  }
  if (record.outcome == StepOutcome::kFailed) {
    context.error_context = record.error;
  }
  context.step_history.push_back(std::move(record));
  context.current_step_index = context.step_history.size();
  return context;
}

WorkflowContext record_lesson(WorkflowContext context,
                              std::string failure_pattern) {
  if (failure_pattern.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "empty failure pattern");
  }
  context.lessons_learned.push_back(std::move(failure_pattern));
  return context;
}

WorkflowContext add_insight(WorkflowContext context, std::string insight) {
  context.performance_insights.push_back(std::move(insight));
  return context;
}

WorkflowReport report_from_context(const WorkflowContext& context) {
  WorkflowReport report;
  report.goal = context.goal;
  report.steps_total = context.step_history.size();
  report.steps_succeeded = context.succeeded_count();
  for (const auto& step : context.step_history) {
    report.total_duration_seconds += step.duration_seconds;
  }
  return report;
}

}  // namespace rxm
