#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "rxm/core/clock.hpp"
#include "rxm/core/workflow.hpp"

namespace rxm::hitl {

// Plain-text run summary. Sections, in order: dataset header, MODEL
// PERFORMANCE SUMMARY, FEATURE ANALYSIS RECAP, RECOMMENDATION SUMMARY,
// WORKFLOW COMPLETION RECAP, HITL INTERACTIONS. Pure function of `report`.
std::string render_summary(const WorkflowReport& report);

// "0.9726 (97.26%)".
std::string format_metric(double value);

// Top-level sections of a complete detailed-results document.
inline constexpr std::string_view kDetailedSections[] = {
    "metadata",        "schema",      "preprocess_plan", "model_attempts", "adaptive_log",
    "recommendations", "confidence",  "review",          "durations"};

// Writes `<out_dir>/<prefix>_<YYYYMMDD_HHMMSS>.json` (keys sorted, two-space
// indent, trailing newline) and returns the path. Throws Error(kSinkUnwritable).
std::filesystem::path write_json_artifact(const nlohmann::json& document,
                                          const std::filesystem::path& out_dir,
                                          std::string_view prefix, TimePoint at);

// detailed_results_<ts>.json.
std::filesystem::path emit_detailed_results(const nlohmann::json& document,
                                            const std::filesystem::path& out_dir,
                                            const Clock& clock);

}  // namespace rxm::hitl
