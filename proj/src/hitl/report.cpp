#include "rxm/hitl/report.hpp"

#include <fstream>

#include <fmt/format.h>

#include "rxm/core/error.hpp"

namespace rxm::hitl {

std::string format_metric(double value) {
  return fmt::format("{:.4f} ({:.2f}%)", value, 100.0 * value);
}

std::string render_summary(const WorkflowReport& r) {
  std::string out;
  auto line = [&out](std::string_view text) {
    out += text;
    out += '\n';
  };
  line("INTELLIGENT SUMMARY");
  line(fmt::format("Dataset: {}", r.dataset_name.empty() ? "N/A" : r.dataset_name));
  line(fmt::format("Problem Type: {}", r.problem_type.empty() ? "N/A" : r.problem_type));
  line(fmt::format("Features: {} columns", r.feature_count));
  line("");

  line("MODEL PERFORMANCE SUMMARY");
  if (!r.model_summary) {
    line("No model was trained.");
  } else {
    const ModelSummary& m = *r.model_summary;
    line(fmt::format("Model: {}", m.model_name));
    if (m.anomaly_count) {
      const std::size_t n = m.sample_count.value_or(0);
      line(fmt::format("anomalies: {} of {} rows ({:.2f}%)", *m.anomaly_count, n,
                       n == 0 ? 0.0 : 100.0 * static_cast<double>(*m.anomaly_count) /
                                          static_cast<double>(n)));
    } else {
      line(fmt::format("{}: {}", m.metric_name, format_metric(m.metric_value)));
    }
  }
  line("");

  line("FEATURE ANALYSIS RECAP");
  line(fmt::format("Feature kept: {}", r.feature_kept));
  line(fmt::format("Feature removed: {}", r.feature_removed));
  line("");

  line("RECOMMENDATION SUMMARY");
  line(fmt::format("Total Recommendations: {}", r.recommendations_total));
  line("Priority Distribution:");
  for (const char* level : {"Critical", "Elevated", "Routine"}) {
    const auto it = r.priority_distribution.find(level);
    if (it != r.priority_distribution.end() && it->second > 0) {
      line(fmt::format("{}: {}", level, it->second));
    }
  }
  line("");

  line("WORKFLOW COMPLETION RECAP");
  line(fmt::format("Goal: {}", r.goal.empty() ? "N/A" : r.goal));
  line(fmt::format("Duration: {:.2f}s", r.total_duration_seconds));
  const double pct = r.steps_total == 0 ? 0.0
                                        : 100.0 * static_cast<double>(r.steps_succeeded) /
                                              static_cast<double>(r.steps_total);
  line(fmt::format("Steps: {}/{} succeeded ({:.1f}%)", r.steps_succeeded, r.steps_total, pct));
  line("");

  line("HITL INTERACTIONS");
  if (r.hitl_outcomes.empty()) line("No review took place.");
  for (const auto& h : r.hitl_outcomes) line(fmt::format("Recommendation Review - {}", h));
  return out;
}

std::filesystem::path write_json_artifact(const nlohmann::json& document,
                                          const std::filesystem::path& out_dir,
                                          std::string_view prefix, TimePoint at) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  const auto path = out_dir / fmt::format("{}_{}.json", prefix, compact_timestamp(at));
  std::ofstream file(path, std::ios::out | std::ios::trunc);
  if (!file) {
    throw Error(ErrorCode::kSinkUnwritable, fmt::format("cannot write '{}'", path.string()));
  }
  file << document.dump(2) << '\n';
  file.flush();
  if (!file) {
    throw Error(ErrorCode::kSinkUnwritable, fmt::format("cannot write '{}'", path.string()));
  }
  return path;
}

std::filesystem::path emit_detailed_results(const nlohmann::json& document,
                                            const std::filesystem::path& out_dir,
                                            const Clock& clock) {
  return write_json_artifact(document, out_dir, "detailed_results",
                             clock ? clock() : std::chrono::system_clock::now());
}

}  // namespace rxm::hitl
