#include "rxm/orchestration/planner.hpp"

#include <algorithm>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "rxm/core/workflow.hpp"

namespace rxm::orchestration {

std::string_view to_string(ParseFailureKind kind) {
  switch (kind) {
    case ParseFailureKind::kMissingKey: return "missing_key";
    case ParseFailureKind::kBadType: return "bad_type";
    case ParseFailureKind::kUnknownTool: return "unknown_tool";
    case ParseFailureKind::kNoJson: return "no_json";
  }
  return "no_json";
}

std::string_view to_string(Provenance p) {
  return p == Provenance::kLlm ? "llm" : "rule_based";
}

namespace {

// End of the balanced object starting at `open`, honouring string literals.
std::optional<std::size_t> object_end(std::string_view text, std::size_t open) {
  int depth = 0;
  bool in_string = false;
  bool escaped = false;
  for (std::size_t i = open; i < text.size(); ++i) {
    const char c = text[i];
    if (in_string) {
      if (escaped) {
        escaped = false;
      } else if (c == '\\') {
        escaped = true;
      } else if (c == '"') {
        in_string = false;
      }
      continue;
    }
    if (c == '"') {
      in_string = true;
    } else if (c == '{') {
      ++depth;
    } else if (c == '}') {
      if (--depth == 0) return i;
    }
  }
  return std::nullopt;
}

std::optional<nlohmann::json> first_object(std::string_view raw) {
  for (std::size_t pos = raw.find('{'); pos != std::string_view::npos; pos = raw.find('{', pos + 1)) {
    const auto end = object_end(raw, pos);
    if (!end) continue;
    try {
      auto doc = nlohmann::json::parse(raw.substr(pos, *end - pos + 1));
      if (doc.is_object()) return doc;
    } catch (const nlohmann::json::exception&) {
    }
  }
  return std::nullopt;
}

}  // namespace

ParseResult parse_decision(std::string_view raw, const std::set<std::string>& registered_tools) {
  const auto doc = first_object(raw);
  if (!doc) return ParseFailure{ParseFailureKind::kNoJson, "no JSON object in the reply"};
  for (const char* key : {"tool", "finish", "reason"}) {
    if (!doc->contains(key)) {
      return ParseFailure{ParseFailureKind::kMissingKey, fmt::format("missing key '{}'", key)};
    }
  }
  const auto& tool = (*doc)["tool"];
  const auto& finish = (*doc)["finish"];
  const auto& reason = (*doc)["reason"];
  if (!tool.is_string() && !tool.is_null()) {
    return ParseFailure{ParseFailureKind::kBadType, "'tool' must be a string"};
  }
  if (!finish.is_boolean()) {
    return ParseFailure{ParseFailureKind::kBadType, "'finish' must be a boolean"};
  }
  if (!reason.is_string() || reason.get<std::string>().empty()) {
    return ParseFailure{ParseFailureKind::kBadType, "'reason' must be a non-empty string"};
  }
  PlannerDecision d;
  d.tool = tool.is_null() ? "" : tool.get<std::string>();
  d.finish = finish.get<bool>();
  d.reason = reason.get<std::string>();
  if (d.tool.empty() && !d.finish) {
    return ParseFailure{ParseFailureKind::kUnknownTool, "empty tool without finish"};
  }
  if (!d.tool.empty() && registered_tools.count(d.tool) == 0) {
    return ParseFailure{ParseFailureKind::kUnknownTool, fmt::format("unknown tool '{}'", d.tool)};
  }
  return d;
}

std::string build_prompt(const WorkflowContext& context, std::string_view retry_note) {
  std::string p;
  p += "You are the planner of a prescriptive-maintenance analytics workflow. Choose the next tool.\n\n";
  p += fmt::format("GOAL:\n{}\n\n", context.goal.empty() ? "N/A" : context.goal);
  p += "AVAILABLE TOOLS:\n";
  for (std::size_t i = 0; i < context.available_tools.size(); ++i) {
    const auto& t = context.available_tools[i];
    p += fmt::format("{}. {} - {}\n", i + 1, t.name, t.description);
  }
  p += "\nSTEP HISTORY:\n";
  if (context.step_history.empty()) p += "(none)\n";
  for (std::size_t i = 0; i < context.step_history.size(); ++i) {
    const auto& s = context.step_history[i];
    p += fmt::format("{}. {} - {} ({:.2f}s): {}\n", i + 1, s.tool_name, to_string(s.outcome),
                     s.duration_seconds, s.summary);
  }
  p += "\nPERFORMANCE INSIGHTS:\n";
  if (context.performance_insights.empty()) p += "(none)\n";
  for (const auto& insight : context.performance_insights) p += fmt::format("- {}\n", insight);
  if (context.error_context) p += fmt::format("\nERROR CONTEXT:\n{}\n", *context.error_context);
  if (!context.lessons_learned.empty()) {
    p += "\nLESSONS LEARNED:\n";
    for (const auto& lesson : context.lessons_learned) p += fmt::format("- {}\n", lesson);
  }
  p += fmt::format("\nSteps used: {} of {}.\n", context.step_history.size(), context.max_steps);
  p += "\nReply with exactly one JSON object with keys \"tool\" (one of the tool names above), "
       "\"finish\" (true or false) and \"reason\" (a short explanation). Example: "
       "{\"tool\": \"load_and_inspect_data\", \"finish\": false, \"reason\": \"...\"}\n";
  if (!retry_note.empty()) {
    p += fmt::format("\nYOUR PREVIOUS REPLY WAS REJECTED: {}\nReply again with only the JSON object.\n",
                     retry_note);
  }
  return p;
}

PlannerDecision rule_based_next(const WorkflowContext& context) {
  static const std::string_view sequence[] = {kToolLoad, kToolPreprocess, kToolAnalyze,
                                              kToolRecommend, kToolSummarize};
  static const std::string_view reasons[] = {
      "No dataset is loaded yet; load and profile it first",
      "The dataset is profiled; build the preprocessing pipeline before modelling",
      "Features are prepared; train and evaluate candidate models",
      "A model is selected; turn its outputs into ranked recommendations",
      "Recommendations are ready; run the review gate and summarize",
  };
  auto succeeded = [&](std::string_view tool) {
    return std::any_of(context.step_history.begin(), context.step_history.end(),
                       [&](const StepRecord& r) {
                         return r.tool_name == tool && r.outcome == StepOutcome::kSucceeded;
                       });
  };
  for (std::size_t i = 0; i < std::size(sequence); ++i) {
    const std::string tool(sequence[i]);
    if (succeeded(tool)) continue;
    std::size_t failures = 0;
    const StepRecord* last_failure = nullptr;
    for (const auto& r : context.step_history) {
      if (r.tool_name == tool && r.outcome == StepOutcome::kFailed) {
        ++failures;
        last_failure = &r;
      }
    }
    if (failures >= 2) {
      return {"", true,
              fmt::format("'{}' failed twice ({}); stopping the workflow", tool,
                          last_failure->error.value_or("unknown error"))};
    }
    if (failures == 1) {
      return {tool, false,
              fmt::format("Retrying '{}' once after: {}", tool,
                          last_failure->error.value_or("unknown error"))};
    }
    return {tool, false, std::string(reasons[i])};
  }
  return {"", true, "All five workflow steps completed"};
}

std::string decision_log_line(const PlannerDecision& d, Provenance provenance) {
  return fmt::format("{} decided: tool='{}', finish={}, reason='{}'",
                     provenance == Provenance::kLlm ? "LLM" : "Rule-based planner", d.tool,
                     d.finish ? "True" : "False", d.reason);
}

PlanOutcome plan_next_step(WorkflowContext context, Backend* backend, const TriggerConfig& trigger,
                           const PlannerIo& io) {
  std::set<std::string> tools;
  for (const auto& t : context.available_tools) tools.insert(t.name);

  PlanOutcome out;
  std::string retry_note;
  std::string fallback_why = "no backend configured";
  const std::size_t attempts = std::max<std::size_t>(1, trigger.max_retries);
  if (backend != nullptr) {
    for (std::size_t attempt = 1; attempt <= attempts; ++attempt) {
      const BackendRequest request{io.model_name, build_prompt(context, retry_note), nlohmann::json::object()};
      ++out.backend_calls;
      const BackendResponse response = backend->generate(request);
      if (!response.succeeded()) {
        fallback_why = fmt::format("backend {}: {}", to_string(response.error->kind), response.error->detail);
        if (io.audit != nullptr) {
          io.audit->append(hitl::Actor::kOrchestrator, "backend_error",
                           {{"attempt", attempt},
                            {"kind", to_string(response.error->kind)},
                            {"detail", response.error->detail}});
        }
        if (io.logger != nullptr) io.logger->warn("Planner backend failed: " + fallback_why);
        break;
      }
      const ParseResult parsed = parse_decision(*response.text, tools);
      if (const auto* d = std::get_if<PlannerDecision>(&parsed)) {
        out.decision = *d;
        out.provenance = Provenance::kLlm;
        break;
      }
      const auto& failure = std::get<ParseFailure>(parsed);
      retry_note = fmt::format("{}: {}", to_string(failure.kind), failure.detail);
      context = record_lesson(std::move(context),
                              fmt::format("planner reply rejected on attempt {} ({})", attempt, retry_note));
      fallback_why = fmt::format("{} unusable replies", attempt);
      if (io.audit != nullptr) {
        io.audit->append(hitl::Actor::kOrchestrator, "planner_parse_failure",
                         {{"attempt", attempt},
                          {"kind", to_string(failure.kind)},
                          {"detail", failure.detail},
                          {"raw", *response.text}});
      }
      if (io.logger != nullptr) io.logger->warn("Planner reply rejected: " + retry_note);
    }
  }
  if (out.provenance != Provenance::kLlm) {
    out.decision = rule_based_next(context);
    out.provenance = Provenance::kRuleBased;
    if (io.logger != nullptr) io.logger->info("Falling back to the rule-based planner (" + fallback_why + ")");
  }
  if (io.audit != nullptr) {
    io.audit->append(hitl::Actor::kOrchestrator, "planner_decision",
                     {{"tool", out.decision.tool},
                      {"finish", out.decision.finish},
                      {"reason", out.decision.reason},
                      {"provenance", to_string(out.provenance)},
                      {"backend_calls", out.backend_calls}});
  }
  if (io.logger != nullptr) io.logger->info(decision_log_line(out.decision, out.provenance));
  out.context = std::move(context);
  return out;
}

std::optional<std::string> slm_advise(Backend* slm, std::string_view tactical_query,
                                      const std::string& model_name, WorkflowContext* context) {
  if (slm == nullptr) return std::nullopt;
  const BackendResponse response = slm->generate(
      {model_name,
       fmt::format("Give one short tactical suggestion (advisory only) for this preprocessing "
                   "situation:\n{}\n",
                   tactical_query),
       nlohmann::json::object()});
  if (!response.succeeded() || response.text->empty()) {
    if (context != nullptr) {
      const std::string why = response.error ? fmt::format("{}: {}", to_string(response.error->kind),
                                                           response.error->detail)
                                             : std::string("empty reply");
      *context = record_lesson(std::move(*context), "advisory model call failed (" + why + ")");
    }
    return std::nullopt;
  }
  return *response.text;
}

}  // namespace rxm::orchestration
