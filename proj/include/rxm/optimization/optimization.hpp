#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "rxm/analytics/analytics.hpp"

namespace rxm::optimization {

using analytics::Matrix;
using analytics::TargetStats;

// Declaration order is rank order.
enum class Priority { kRoutine, kElevated, kCritical };

std::string_view to_string(Priority p);
// "warning" is read as Elevated.
std::optional<Priority> parse_priority(std::string_view text);

struct Thresholds {
  double high = 0.0;      // mean + 2 std
  double critical = 0.0;  // mean + 3 std
  bool degenerate = false;
};

Thresholds thresholds(const TargetStats& stats);
// (predicted - mean) / std. Throws Error(kDegenerateStd) when std is not positive.
double priority_score(double predicted, const TargetStats& stats);
// Strict on both edges: predicted == high is Routine.
Priority label_for(double predicted, const Thresholds& t);

struct ActionEntry {
  std::string action;
  double cost = 0.0;   // currency units
  double hours = 0.0;
};

struct ActionTable {
  ActionEntry critical{"Immediately dispatch maintenance team; inspect and restore", 1000.0, 4.0};
  ActionEntry elevated{"Schedule inspection within 48 h", 400.0, 2.0};
  ActionEntry routine{"Continue monitoring", 50.0, 0.5};

  const ActionEntry& at(Priority p) const;
};

struct ContributingFeature {
  std::string feature;
  double weight = 0.0;
};

struct Recommendation {
  std::string machine_id;
  Priority priority = Priority::kRoutine;
  double priority_score = 0.0;
  std::string score_basis;
  std::vector<ContributingFeature> contributing_features;
  std::string action;
  double cost_estimate = 0.0;
  double time_estimate = 0.0;
  bool advisory = false;
};

// (priority rank desc, priority_score desc, machine_id asc).
bool ranks_before(const Recommendation& a, const Recommendation& b);
void rank(std::vector<Recommendation>& recs);

struct RecommendConfig {
  std::map<std::string, Priority> class_mapping{
      {"High", Priority::kCritical}, {"Medium", Priority::kElevated}, {"Low", Priority::kRoutine}};
  bool include_routine = false;
  std::size_t max_recommendations = 10;
  std::size_t max_advisories = 50;
  std::size_t top_k_features = 3;
  double extreme_z = 3.0;
  std::size_t min_extreme_features = 2;
  ActionTable actions;
};

struct RecommendationSet {
  std::vector<Recommendation> recommendations;
  std::size_t candidates_before_cap = 0;
  std::vector<std::string> warnings;
};

// Rows scored by a supervised model: one machine id and one row of
// standard-scaled features per evaluated row.
struct ScoredRows {
  std::vector<std::string> machine_ids;
  Matrix features;
  std::vector<std::string> feature_names;
};

// Maps predicted labels through class_mapping (unmapped labels that name a
// priority map to it, others to Routine). Each machine keeps its best-ranked
// row. priority_score is the predicted class probability, a surrogate.
// Throws Error(kMissingImportances).
RecommendationSet recommend_classification(const analytics::ModelResult& result,
                                           const std::vector<std::string>& class_names,
                                           const ScoredRows& rows,
                                           const RecommendConfig& config = {});

// mean + 2/3 std thresholds on train-target statistics; degenerate std sends every
// prediction to Routine with a warning.
RecommendationSet recommend_regression(const analytics::ModelResult& result,
                                       const ScoredRows& rows,
                                       const RecommendConfig& config = {});

// Advisory recommendations for flagged rows grouped by machine. z-scores use
// the mean and population std of every row in `features`.
RecommendationSet recommend_anomaly(std::span<const double> scores, const std::vector<bool>& flags,
                                    const ScoredRows& rows, const RecommendConfig& config = {});

enum class ConfidenceLevel { kHigh, kMedium, kLow };
std::string_view to_string(ConfidenceLevel level);

struct ConfidenceAssessment {
  ConfidenceLevel level = ConfidenceLevel::kMedium;
  std::optional<double> metric;
  std::string metric_name;
  std::optional<std::string> warning;
  std::optional<std::string> note;
};

// >= 0.8 high, [0.6, 0.8) medium, < 0.6 low with a warning. Anomaly
// detection is medium with a note.
ConfidenceAssessment assess_confidence(const analytics::Metrics& metrics, analytics::TaskKind task);

nlohmann::json to_json(const Recommendation& rec);
nlohmann::json to_json(const std::vector<Recommendation>& recs);
nlohmann::json to_json(const ConfidenceAssessment& c);
nlohmann::json to_json(const Thresholds& t);

// Priority name -> count, every level present.
std::map<std::string, std::size_t> priority_distribution(const std::vector<Recommendation>& recs);

}  // namespace rxm::optimization
