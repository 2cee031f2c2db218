#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "rxm/perception/perception.hpp"
#include "rxm/preprocessing/plan.hpp"
#include "rxm/preprocessing/schema.hpp"

namespace rxm::preprocessing {

// Linear-interpolation quantile over sorted values: position q * (n - 1).
double quantile_sorted(std::span<const double> sorted, double q);
double median_of(std::vector<double> values);
// Most frequent value; ties go to the lexicographically smallest.
std::string mode_of(const std::vector<std::string>& values);

struct FittedColumn {
  ColumnDirective directive;
  bool numeric = false;
  // Fallback fills, always fitted, so a missing cell never reaches the model
  // even when the directive says no imputation was needed.
  double median = 0.0;
  std::string mode;
  // Scaling: x' = (x - center) / spread. Zero spread is replaced by 1.
  double center = 0.0;
  double spread = 1.0;
  bool degenerate = false;
  // one_hot: sorted training vocabulary.
  std::vector<std::string> vocabulary;
  // target_encoding: per-category mean of the encoded training target.
  std::map<std::string, double> target_means;
  double global_target_mean = 0.0;
  std::vector<std::string> output_names;
};

// Retained training rows for k-nearest-neighbour imputation.
struct KnnIndex {
  std::vector<std::string> distance_columns;  // numeric features
  std::vector<double> means;                  // standard-scaling parameters
  std::vector<double> stds;
  Eigen::MatrixXd scaled;                     // train rows x distance columns, NaN = missing
  // Raw training values of every KNN-imputed column.
  std::map<std::string, std::vector<perception::Cell>> values;
};

struct FittedPipeline {
  std::vector<FittedColumn> columns;  // every directive, frame order
  std::vector<std::string> output_columns;
  std::vector<std::string> identifier_columns;
  std::optional<std::string> target_name;
  bool target_discrete = false;
  std::vector<std::string> target_classes;  // discrete targets, sorted
  std::optional<KnnIndex> knn;
  std::size_t train_rows = 0;

  const FittedColumn* find(const std::string& column) const;
};

// Statistics come from `train_rows` only. Scaling parameters are fitted on
// the observed (non-missing) training values. Throws Error(kEmptyTrainSet).
FittedPipeline fit_pipeline(const perception::DatasetFrame& frame,
                            const PreprocessPlan& plan, const SchemaMap& schema,
                            std::span<const std::size_t> train_rows);

struct TransformedData {
  Eigen::MatrixXd features;
  std::vector<std::string> feature_names;
  // One vector per identifier column, values verbatim.
  std::vector<std::pair<std::string, std::vector<std::string>>> identifiers;
  std::optional<std::vector<perception::Cell>> target;
  std::vector<std::size_t> rows;

  // First identifier column, or "row_<index>" when there is none.
  std::vector<std::string> machine_ids() const;
};

// Throws Error(kMissingColumn) when a fitted column is absent from `frame`.
TransformedData apply_pipeline(const FittedPipeline& pipeline,
                               const perception::DatasetFrame& frame,
                               std::span<const std::size_t> rows);

// One object per column: {role, imputation, scaling, encoding, rationale,
// fitted}. `pipeline` may be null before fitting.
nlohmann::json to_json(const PreprocessPlan& plan, const FittedPipeline* pipeline);

}  // namespace rxm::preprocessing
