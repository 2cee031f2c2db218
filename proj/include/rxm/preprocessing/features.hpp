#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "rxm/perception/perception.hpp"
#include "rxm/preprocessing/schema.hpp"

namespace rxm::preprocessing {

enum class RemovalReason { kConstant, kRedundant, kHighCardinalityUnencodable };

std::string_view to_string(RemovalReason reason);

struct Correlation {
  std::string first;
  std::string second;
  double r = 0.0;
};

struct RemovedFeature {
  std::string column;
  RemovalReason reason;
  std::string detail;
};

struct FeatureReport {
  std::vector<Correlation> pearson_correlations;
  std::map<std::string, double> mutual_information;  // nats, vs the target
  std::optional<std::map<std::string, double>> importances;
  std::vector<RemovedFeature> removed;
  std::vector<std::string> kept;

  std::optional<double> correlation(const std::string& a, const std::string& b) const;
  bool is_removed(const std::string& column) const;
};

struct FeatureAnalysisConfig {
  double redundancy_r = 0.95;          // |r| above this is redundant
  std::size_t mi_bins = 10;            // equal-frequency bins
  std::size_t max_one_hot_levels = 50; // beyond this a category needs a target
  std::size_t importance_trees = 25;
  std::size_t importance_depth = 8;
  double importance_subsample = 0.5;
  std::uint64_t seed = 42;
};

// Pearson r over rows where both values are present; nullopt when fewer than
// two such rows or either side is constant.
std::optional<double> pearson(const std::vector<std::optional<double>>& a,
                              const std::vector<std::optional<double>>& b);

// Equal-frequency bin index per value (nullopt stays nullopt). Cut points are
// the order statistics at floor(k * m / bins), k = 1..bins-1, and a value
// falls in bin #{cuts <= value}.
std::vector<std::optional<std::size_t>> equal_frequency_bins(
    const std::vector<std::optional<double>>& values, std::size_t bins);

// Plug-in mutual information (nats) of two discrete codings over rows where
// both are present.
double plugin_mutual_information(const std::vector<std::optional<std::size_t>>& a,
                                 const std::vector<std::optional<std::size_t>>& b);

// Throws Error(kNoFeatures) when the schema has no feature columns.
FeatureReport analyze_features(const perception::DatasetFrame& frame,
                               const perception::DatasetMetadata& metadata,
                               const SchemaMap& schema,
                               const FeatureAnalysisConfig& config = {});

nlohmann::json to_json(const FeatureReport& report);

}  // namespace rxm::preprocessing
