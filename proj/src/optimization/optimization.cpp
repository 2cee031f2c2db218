#include "rxm/optimization/optimization.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include <fmt/format.h>

#include "rxm/core/error.hpp"

namespace rxm::optimization {

std::string_view to_string(Priority p) {
  switch (p) {
    case Priority::kCritical: return "Critical";
    case Priority::kElevated: return "Elevated";
    case Priority::kRoutine: return "Routine";
  }
  return "Routine";
}

std::optional<Priority> parse_priority(std::string_view text) {
  std::string lower(text);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "critical") return Priority::kCritical;
  if (lower == "elevated" || lower == "warning") return Priority::kElevated;
  if (lower == "routine") return Priority::kRoutine;
  return std::nullopt;
}

Thresholds thresholds(const TargetStats& stats) {
  Thresholds t;
  t.high = stats.mean + 2.0 * stats.std;
  t.critical = stats.mean + 3.0 * stats.std;
  t.degenerate = !(stats.std > 0.0);
  return t;
}

double priority_score(double predicted, const TargetStats& stats) {
  if (!(stats.std > 0.0)) {
    throw Error(ErrorCode::kDegenerateStd,
                fmt::format("training target std is {}; priority score undefined", stats.std));
  }
  return (predicted - stats.mean) / stats.std;
}

Priority label_for(double predicted, const Thresholds& t) {
  if (t.degenerate) return Priority::kRoutine;
  if (predicted > t.critical) return Priority::kCritical;
  if (predicted > t.high) return Priority::kElevated;
  return Priority::kRoutine;
}

const ActionEntry& ActionTable::at(Priority p) const {
  switch (p) {
    case Priority::kCritical: return critical;
    case Priority::kElevated: return elevated;
    case Priority::kRoutine: break;
  }
  return routine;
}

bool ranks_before(const Recommendation& a, const Recommendation& b) {
  if (a.priority != b.priority) return a.priority > b.priority;
  if (a.priority_score != b.priority_score) return a.priority_score > b.priority_score;
  return a.machine_id < b.machine_id;
}

void rank(std::vector<Recommendation>& recs) {
  std::stable_sort(recs.begin(), recs.end(), ranks_before);
}

namespace {

void check_rows(const ScoredRows& rows, std::size_t n) {
  if (rows.machine_ids.size() != n || static_cast<std::size_t>(rows.features.rows()) != n) {
    throw Error(ErrorCode::kInvalidArgument,
                fmt::format("{} scored rows but {} machine ids and {} feature rows", n,
                            rows.machine_ids.size(), rows.features.rows()));
  }
  if (static_cast<std::size_t>(rows.features.cols()) != rows.feature_names.size()) {
    throw Error(ErrorCode::kInvalidArgument, "feature names do not match the feature matrix");
  }
}

// Top-k features by global importance, each re-weighted by the row's
// |standard-scaled value| and listed by that weight.
std::vector<ContributingFeature> contributions(const std::map<std::string, double>& importances,
                                               const ScoredRows& rows, Eigen::Index row,
                                               std::size_t k) {
  std::vector<std::pair<std::string, double>> global;
  for (std::size_t j = 0; j < rows.feature_names.size(); ++j) {
    const auto it = importances.find(rows.feature_names[j]);
    global.emplace_back(rows.feature_names[j], it == importances.end() ? 0.0 : it->second);
  }
  std::vector<std::size_t> order(global.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (global[a].second != global[b].second) return global[a].second > global[b].second;
    return global[a].first < global[b].first;
  });
  order.resize(std::min(k, order.size()));
  std::vector<ContributingFeature> out;
  for (std::size_t j : order) {
    out.push_back({global[j].first,
                   global[j].second * std::abs(rows.features(row, static_cast<Eigen::Index>(j)))});
  }
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    if (a.weight != b.weight) return a.weight > b.weight;
    return a.feature < b.feature;
  });
  return out;
}

Recommendation make(std::string machine, Priority p, double score, std::string basis,
                    std::vector<ContributingFeature> features, bool advisory,
                    const ActionTable& table) {
  const ActionEntry& entry = table.at(p);
  Recommendation r;
  r.machine_id = std::move(machine);
  r.priority = p;
  r.priority_score = score;
  r.score_basis = std::move(basis);
  r.contributing_features = std::move(features);
  r.action = entry.action;
  r.cost_estimate = entry.cost;
  r.time_estimate = entry.hours;
  r.advisory = advisory;
  return r;
}

// Keeps each machine's best-ranked recommendation, ranks, and caps.
RecommendationSet finalize(std::vector<Recommendation> recs, std::size_t cap, bool include_routine) {
  std::map<std::string, Recommendation> best;
  for (auto& r : recs) {
    if (!include_routine && r.priority == Priority::kRoutine) continue;
    auto it = best.find(r.machine_id);
    if (it == best.end()) {
      best.emplace(r.machine_id, std::move(r));
    } else if (ranks_before(r, it->second)) {
      it->second = std::move(r);
    }
  }
  RecommendationSet out;
  for (auto& [id, r] : best) out.recommendations.push_back(std::move(r));
  rank(out.recommendations);
  out.candidates_before_cap = out.recommendations.size();
  if (out.recommendations.size() > cap) out.recommendations.resize(cap);
  return out;
}

Priority map_class(const std::string& label, const RecommendConfig& config) {
  if (const auto it = config.class_mapping.find(label); it != config.class_mapping.end()) {
    return it->second;
  }
  return parse_priority(label).value_or(Priority::kRoutine);
}

}  // namespace

RecommendationSet recommend_classification(const analytics::ModelResult& result,
                                           const std::vector<std::string>& class_names,
                                           const ScoredRows& rows, const RecommendConfig& config) {
  if (!result.feature_importances) {
    throw Error(ErrorCode::kMissingImportances,
                fmt::format("{} result carries no feature importances",
                            analytics::to_string(result.spec.family)));
  }
  const std::size_t n = result.test_predictions.size();
  check_rows(rows, n);
  std::vector<Recommendation> recs;
  for (std::size_t i = 0; i < n; ++i) {
    const auto cls = static_cast<std::size_t>(std::llround(result.test_predictions[i]));
    const std::string label = cls < class_names.size() ? class_names[cls] : std::to_string(cls);
    double prob = 1.0;
    if (i < result.test_probabilities.size() && cls < result.test_probabilities[i].size()) {
      prob = result.test_probabilities[i][cls];
    }
    recs.push_back(make(rows.machine_ids[i], map_class(label, config), prob,
                        "predicted-class probability (surrogate; no z-score for classes)",
                        contributions(*result.feature_importances, rows,
                                      static_cast<Eigen::Index>(i), config.top_k_features),
                        false, config.actions));
  }
  return finalize(std::move(recs), config.max_recommendations, config.include_routine);
}

RecommendationSet recommend_regression(const analytics::ModelResult& result,
                                       const ScoredRows& rows, const RecommendConfig& config) {
  if (!result.train_target_stats) {
    throw Error(ErrorCode::kInvalidArgument, "regression result lacks training target statistics");
  }
  if (!result.feature_importances) {
    throw Error(ErrorCode::kMissingImportances,
                fmt::format("{} result carries no feature importances",
                            analytics::to_string(result.spec.family)));
  }
  const std::size_t n = result.test_predictions.size();
  check_rows(rows, n);
  const TargetStats& stats = *result.train_target_stats;
  const Thresholds t = thresholds(stats);
  std::vector<Recommendation> recs;
  for (std::size_t i = 0; i < n; ++i) {
    const double predicted = result.test_predictions[i];
    const double score = t.degenerate ? 0.0 : priority_score(predicted, stats);
    recs.push_back(make(rows.machine_ids[i], label_for(predicted, t), score,
                        "z-score of the prediction against training target mean/std",
                        contributions(*result.feature_importances, rows,
                                      static_cast<Eigen::Index>(i), config.top_k_features),
                        false, config.actions));
  }
  RecommendationSet out = finalize(std::move(recs), config.max_recommendations, config.include_routine);
  if (t.degenerate) {
    out.warnings.push_back(fmt::format(
        "training target std is {}: thresholds collapse to the mean and every prediction is Routine",
        stats.std));
  }
  return out;
}

RecommendationSet recommend_anomaly(std::span<const double> scores, const std::vector<bool>& flags,
                                    const ScoredRows& rows, const RecommendConfig& config) {
  const std::size_t n = scores.size();
  if (flags.size() != n) throw Error(ErrorCode::kInvalidArgument, "scores and flags differ in length");
  check_rows(rows, n);
  const Eigen::Index p = rows.features.cols();
  std::vector<double> mean(static_cast<std::size_t>(p), 0.0), sd(static_cast<std::size_t>(p), 0.0);
  for (Eigen::Index j = 0; j < p; ++j) {
    const auto col = rows.features.col(j);
    const double m = col.mean();
    mean[static_cast<std::size_t>(j)] = m;
    sd[static_cast<std::size_t>(j)] =
        n == 0 ? 0.0 : std::sqrt((col.array() - m).square().sum() / static_cast<double>(n));
  }

  struct Group {
    double best_score = -INFINITY;
    std::map<std::size_t, double> z;  // feature -> z with the largest |z|
  };
  std::map<std::string, Group> groups;
  for (std::size_t i = 0; i < n; ++i) {
    if (!flags[i]) continue;
    Group& g = groups[rows.machine_ids[i]];
    g.best_score = std::max(g.best_score, scores[i]);
    for (Eigen::Index j = 0; j < p; ++j) {
      const auto f = static_cast<std::size_t>(j);
      const double z = sd[f] > 0.0 ? (rows.features(static_cast<Eigen::Index>(i), j) - mean[f]) / sd[f] : 0.0;
      auto [it, inserted] = g.z.emplace(f, z);
      if (!inserted && std::abs(z) > std::abs(it->second)) it->second = z;
    }
  }

  std::vector<Recommendation> recs;
  for (const auto& [machine, g] : groups) {
    std::vector<std::pair<std::size_t, double>> ordered(g.z.begin(), g.z.end());
    std::stable_sort(ordered.begin(), ordered.end(), [&](const auto& a, const auto& b) {
      if (std::abs(a.second) != std::abs(b.second)) return std::abs(a.second) > std::abs(b.second);
      return rows.feature_names[a.first] < rows.feature_names[b.first];
    });
    std::vector<ContributingFeature> extreme;
    for (const auto& [f, z] : ordered) {
      if (std::abs(z) >= config.extreme_z) extreme.push_back({rows.feature_names[f], z});
    }
    const bool inspect = extreme.size() >= config.min_extreme_features;
    std::vector<ContributingFeature> listed = extreme;
    if (!inspect) {
      listed.clear();
      for (std::size_t k = 0; k < std::min(config.top_k_features, ordered.size()); ++k) {
        listed.push_back({rows.feature_names[ordered[k].first], ordered[k].second});
      }
    }
    Recommendation r = make(machine, inspect ? Priority::kElevated : Priority::kRoutine,
                            g.best_score, "maximum isolation-forest anomaly score",
                            std::move(listed), true, config.actions);
    if (inspect) {
      std::string names;
      for (const auto& e : extreme) names += (names.empty() ? "" : ", ") + e.feature;
      r.action = fmt::format("{} ({} readings beyond {} sigma: {})", r.action, extreme.size(),
                             config.extreme_z, names);
    }
    recs.push_back(std::move(r));
  }
  rank(recs);
  RecommendationSet out;
  out.candidates_before_cap = recs.size();
  if (recs.size() > config.max_advisories) recs.resize(config.max_advisories);
  out.recommendations = std::move(recs);
  return out;
}

std::string_view to_string(ConfidenceLevel level) {
  switch (level) {
    case ConfidenceLevel::kHigh: return "high";
    case ConfidenceLevel::kMedium: return "medium";
    case ConfidenceLevel::kLow: return "low";
  }
  return "medium";
}

ConfidenceAssessment assess_confidence(const analytics::Metrics& metrics, analytics::TaskKind task) {
  ConfidenceAssessment c;
  c.metric_name = std::string(analytics::primary_metric_name(task));
  if (task == analytics::TaskKind::kAnomalyDetection) {
    c.level = ConfidenceLevel::kMedium;
    c.note = "unsupervised - no ground truth to measure anomaly flags against";
    return c;
  }
  c.metric = task == analytics::TaskKind::kClassification ? metrics.accuracy : metrics.r2;
  const double m = c.metric.value_or(-INFINITY);
  if (m >= 0.8) {
    c.level = ConfidenceLevel::kHigh;
  } else if (m >= 0.6) {
    c.level = ConfidenceLevel::kMedium;
  } else {
    c.level = ConfidenceLevel::kLow;
    c.warning = c.metric ? fmt::format("{} {:.4f} < 0.6: reduced reliability, review recommendations "
                                       "before acting", c.metric_name, m)
                         : std::string("no performance metric: reduced reliability");
  }
  return c;
}

nlohmann::json to_json(const Recommendation& r) {
  nlohmann::json features = nlohmann::json::array();
  for (const auto& f : r.contributing_features) {
    features.push_back({{"feature", f.feature}, {"weight", f.weight}});
  }
  return {{"machine_id", r.machine_id},
          {"priority", to_string(r.priority)},
          {"priority_score", r.priority_score},
          {"score_basis", r.score_basis},
          {"contributing_features", features},
          {"action", r.action},
          {"cost_estimate", r.cost_estimate},
          {"time_estimate", r.time_estimate},
          {"advisory", r.advisory}};
}

nlohmann::json to_json(const std::vector<Recommendation>& recs) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& r : recs) out.push_back(to_json(r));
  return out;
}

nlohmann::json to_json(const ConfidenceAssessment& c) {
  nlohmann::json out = {{"level", to_string(c.level)}, {"metric_name", c.metric_name}};
  out["metric"] = c.metric ? nlohmann::json(*c.metric) : nlohmann::json();
  out["warning"] = c.warning ? nlohmann::json(*c.warning) : nlohmann::json();
  out["note"] = c.note ? nlohmann::json(*c.note) : nlohmann::json();
  return out;
}

nlohmann::json to_json(const Thresholds& t) {
  return {{"high", t.high}, {"critical", t.critical}, {"degenerate", t.degenerate}};
}

std::map<std::string, std::size_t> priority_distribution(const std::vector<Recommendation>& recs) {
  std::map<std::string, std::size_t> out{{"Critical", 0}, {"Elevated", 0}, {"Routine", 0}};
  for (const auto& r : recs) ++out[std::string(to_string(r.priority))];
  return out;
}

}  // namespace rxm::optimization
