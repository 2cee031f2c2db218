#pragma once

#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>

#include "rxm/analytics/analytics.hpp"
#include "rxm/core/logger.hpp"
#include "rxm/core/workflow.hpp"
#include "rxm/hitl/audit.hpp"
#include "rxm/orchestration/backend.hpp"

namespace rxm::orchestration {

struct PlannerDecision {
  std::string tool;  // empty only when finish is true
  bool finish = false;
  std::string reason;

  bool operator==(const PlannerDecision&) const = default;
};

enum class ParseFailureKind { kMissingKey, kBadType, kUnknownTool, kNoJson };

std::string_view to_string(ParseFailureKind kind);

struct ParseFailure {
  ParseFailureKind kind = ParseFailureKind::kNoJson;
  std::string detail;
};

using ParseResult = std::variant<PlannerDecision, ParseFailure>;

// Validates the first JSON object found in `raw` (prose around it is
// ignored): keys "tool" (string), "finish" (bool) and "reason" (non-empty
// string); tool must be registered unless finish is true and tool is empty.
ParseResult parse_decision(std::string_view raw, const std::set<std::string>& registered_tools);

// Goal, numbered tools, step history, performance insights, error context,
// lessons, then the reply instruction. `retry_note` explains why the previous
// reply was rejected.
std::string build_prompt(const WorkflowContext& context, std::string_view retry_note = {});

struct TriggerConfig {
  std::size_t max_retries = 3;  // total backend attempts per planning step
  std::size_t max_steps = 10;
  analytics::AdaptiveThresholds adaptive;
};

enum class Provenance { kLlm, kRuleBased };

std::string_view to_string(Provenance p);

// Fixed sequence load -> preprocess -> analyze -> recommend -> summarize.
// A failed step is re-issued once; a second failure finishes the run.
PlannerDecision rule_based_next(const WorkflowContext& context);

struct PlanOutcome {
  PlannerDecision decision;
  Provenance provenance = Provenance::kRuleBased;
  std::size_t backend_calls = 0;
  WorkflowContext context;  // with any lessons recorded while planning
};

struct PlannerIo {
  std::string model_name = "llama3";
  hitl::AuditLog* audit = nullptr;
  const Logger* logger = nullptr;
};

// Asks the backend (null counts as unavailable); each parse failure is a
// lesson and a retry with the failure appended to the prompt. After
// max_retries failures, or when the backend errors, the rule-based planner
// decides. The decision is audited and logged.
PlanOutcome plan_next_step(WorkflowContext context, Backend* backend, const TriggerConfig& trigger,
                           const PlannerIo& io = {});

// LLM decided: tool='preprocess_data', finish=False, reason='...'
std::string decision_log_line(const PlannerDecision& decision, Provenance provenance);

// Optional small-model advice. Returns nullopt when no backend is set or the
// call fails; the failure becomes a lesson in `context` when given.
std::optional<std::string> slm_advise(Backend* slm, std::string_view tactical_query,
                                      const std::string& model_name,
                                      WorkflowContext* context = nullptr);

}  // namespace rxm::orchestration
