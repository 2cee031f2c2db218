#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "rxm/perception/perception.hpp"
#include "rxm/preprocessing/features.hpp"
#include "rxm/preprocessing/schema.hpp"

namespace rxm::preprocessing {

enum class Imputation { kNone, kKnn, kMedian, kMostFrequent };
enum class Scaling { kNone, kStandard, kRobust };
enum class Encoding { kPassthrough, kOneHot, kTargetEncoding, kDrop };

std::string_view to_string(Imputation v);
std::string_view to_string(Scaling v);
std::string_view to_string(Encoding v);

inline constexpr std::size_t kKnnNeighbors = 3;

struct ColumnDirective {
  std::string column;
  Role role = Role::kFeatureNumeric;
  Imputation imputation = Imputation::kNone;
  Scaling scaling = Scaling::kNone;
  Encoding encoding = Encoding::kPassthrough;
  std::string rationale;

  bool operator==(const ColumnDirective&) const = default;
};

struct PreprocessPlan {
  // Frame order; the chosen target has no directive.
  std::vector<ColumnDirective> directives;
  std::vector<std::string> advisory_notes;
  bool backup = false;

  const ColumnDirective* find(const std::string& column) const;

  bool operator==(const PreprocessPlan&) const = default;
};

struct ToolDeciderConfig {
  double knn_above_missing = 0.20;       // strictly above -> KNN imputation
  std::size_t robust_above_bytes = 100u << 20;  // strictly above -> robust scaling
  std::size_t max_one_hot_levels = 50;
};

// The rule table that maps missingness, memory footprint and category counts
// to imputation, scaling and encoding directives.
PreprocessPlan decide_tools(const perception::DatasetMetadata& metadata,
                            const SchemaMap& schema,
                            const ToolDeciderConfig& config = {});

// Conservative plan used after a preprocessing failure: median/most-frequent
// imputation, standard scaling, high-cardinality categoricals dropped.
PreprocessPlan backup_plan(const perception::DatasetMetadata& metadata,
                           const SchemaMap& schema,
                           const ToolDeciderConfig& config = {});

// Marks every column removed by feature analysis as dropped.
PreprocessPlan apply_feature_removals(PreprocessPlan plan, const FeatureReport& report);

}  // namespace rxm::preprocessing
