#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "rxm/analytics/models/tree.hpp"
#include "rxm/perception/perception.hpp"
#include "rxm/preprocessing/schema.hpp"

namespace rxm::analytics {

enum class TaskKind { kClassification, kRegression, kAnomalyDetection };

std::string_view to_string(TaskKind kind);
// Accepts "classification", "regression", "anomaly" / "anomaly_detection".
std::optional<TaskKind> parse_task(std::string_view text);

// Override wins; no chosen target means anomaly detection; text targets or
// numeric targets with at most 20 distinct values are classification.
TaskKind infer_task(const preprocessing::SchemaMap& schema,
                    const perception::DatasetMetadata& metadata,
                    std::optional<TaskKind> override_kind = std::nullopt);

enum class ModelFamily {
  kRandomForestClf,
  kLogisticRegression,
  kSvmRbfClf,
  kRandomForestReg,
  kLinearRegression,
  kRidge,
  kLasso,
  kSvrRbf,
  kIsolationForest,
};

std::string_view to_string(ModelFamily family);

struct ModelSpec {
  ModelFamily family = ModelFamily::kRandomForestClf;
  nlohmann::json hyperparameters = nlohmann::json::object();
  std::uint64_t seed = 42;
};

struct CandidateOptions {
  std::uint64_t seed = 42;
  std::optional<double> contamination;  // nullopt == auto
  std::size_t svm_max_samples = 2000;
};

// Rule-ordered candidate families with their fixed hyperparameters.
// Throws Error(kTooFewSamples) below 10 samples.
std::vector<ModelSpec> select_candidates(TaskKind task, std::size_t n_samples,
                                         const CandidateOptions& options = {});
// Families left out by the sample-count guard, with the reason.
std::vector<std::string> skipped_candidates(TaskKind task, std::size_t n_samples,
                                            const CandidateOptions& options = {});

struct Split {
  std::vector<std::size_t> train;  // ascending
  std::vector<std::size_t> test;   // ascending
};

// Positions 0..n_rows-1. The test share is round(n_rows * (1 - ratio)); for
// classification `labels` gives each position's class and the test rows are
// allocated per class by largest remainder. Throws Error(kClassTooSmall)
// when a class has fewer than two members.
Split split(std::size_t n_rows, TaskKind task, std::span<const std::size_t> labels,
            double ratio, std::uint64_t seed);

struct ClassReport {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t support = 0;
};

struct Metrics {
  std::optional<double> accuracy;
  std::optional<double> macro_precision;
  std::optional<double> macro_recall;
  std::optional<double> macro_f1;
  std::optional<std::map<std::string, ClassReport>> per_class;
  std::optional<double> r2;
  std::optional<double> mse;
  std::optional<std::size_t> anomaly_count;
  std::optional<std::vector<double>> anomaly_scores;
};

// Macro averages run over the classes present in either vector; an undefined
// precision or recall (no predictions / no support) counts as 0.
Metrics classification_metrics(std::span<const std::size_t> truth,
                               std::span<const std::size_t> predicted,
                               const std::vector<std::string>& class_names);
// R^2 of a constant truth vector is 1 for a perfect fit and 0 otherwise.
Metrics regression_metrics(std::span<const double> truth, std::span<const double> predicted);

struct TargetStats {
  double mean = 0.0;
  double std = 0.0;  // population
  std::size_t n = 0;
};

TargetStats target_stats(std::span<const double> values);

enum class ModelStatus { kOk, kTrainingFailed };

struct ModelResult {
  ModelSpec spec;
  ModelStatus status = ModelStatus::kOk;
  std::string error;
  Metrics metrics;
  std::optional<std::map<std::string, double>> feature_importances;
  std::string importance_method;
  // Class index (classification), value (regression) or anomaly score.
  std::vector<double> test_predictions;
  std::vector<std::vector<double>> test_probabilities;  // classification
  std::vector<bool> anomaly_flags;
  std::optional<TargetStats> train_target_stats;

  bool ok() const { return status == ModelStatus::kOk; }
};

// Feature matrices produced by the fitted preprocessing pipeline. Anomaly
// detection trains and scores on x_train and ignores the test half.
struct TrainingSet {
  Matrix x_train;
  Matrix x_test;
  std::vector<double> y_train;  // class index or value
  std::vector<double> y_test;
  std::vector<std::string> feature_names;
  std::vector<std::string> class_names;
};

// Never throws: any training error is returned as kTrainingFailed.
ModelResult fit_predict_evaluate(const TrainingSet& data, const ModelSpec& spec, TaskKind task);

// Accuracy or r2; nullopt for failed results and anomaly detection.
std::optional<double> primary_metric(const ModelResult& result, TaskKind task);
std::string_view primary_metric_name(TaskKind task);

struct AdaptiveThresholds {
  double min_accuracy = 0.6;
  double min_r2 = 0.1;
};

// Strict comparisons: exactly 0.6 accuracy or 0.1 r2 does not trigger. A
// failed result always triggers.
std::optional<std::string> exploration_trigger(const ModelResult& result, TaskKind task,
                                               const AdaptiveThresholds& thresholds = {});

struct AdaptiveSearchLog {
  std::string trigger_reason;  // empty when the first model was kept
  std::vector<ModelResult> attempts;
  std::size_t best_index = 0;
  std::string primary_metric_name;

  const ModelResult& best() const { return attempts.at(best_index); }
};

using Trainer = std::function<ModelResult(const ModelSpec&)>;

// `remaining` excludes the first candidate. Throws Error(kAllModelsFailed)
// when no attempt succeeded.
AdaptiveSearchLog adaptive_search(TaskKind task, ModelResult first,
                                  std::span<const ModelSpec> remaining,
                                  const Trainer& train,
                                  const AdaptiveThresholds& thresholds = {});
AdaptiveSearchLog adaptive_search(const TrainingSet& data, TaskKind task, ModelResult first,
                                  std::span<const ModelSpec> remaining,
                                  const AdaptiveThresholds& thresholds = {});

nlohmann::json to_json(const ModelSpec& spec);
nlohmann::json to_json(const Metrics& metrics);
// Per-row vectors are summarized, not listed.
nlohmann::json to_json(const ModelResult& result);
nlohmann::json to_json(const AdaptiveSearchLog& log);

}  // namespace rxm::analytics
