#include "rxm/preprocessing/plan.hpp"

#include <fmt/format.h>

namespace rxm::preprocessing {

std::string_view to_string(Imputation v) {
  switch (v) {
    case Imputation::kNone: return "none";
    case Imputation::kKnn: return "knn(k=3)";
    case Imputation::kMedian: return "median";
    case Imputation::kMostFrequent: return "most_frequent";
  }
  return "unknown";
}

std::string_view to_string(Scaling v) {
  switch (v) {
    case Scaling::kNone: return "none";
    case Scaling::kStandard: return "standard";
    case Scaling::kRobust: return "robust";
  }
  return "unknown";
}

std::string_view to_string(Encoding v) {
  switch (v) {
    case Encoding::kPassthrough: return "passthrough";
    case Encoding::kOneHot: return "one_hot";
    case Encoding::kTargetEncoding: return "target_encoding";
    case Encoding::kDrop: return "drop";
  }
  return "unknown";
}

const ColumnDirective* PreprocessPlan::find(const std::string& column) const {
  for (const auto& d : directives) {
    if (d.column == column) return &d;
  }
  return nullptr;
}

namespace {

struct Choice {
  Imputation imputation;
  std::string why;
};

Choice choose_imputation(const perception::ColumnProfile& p, bool numeric,
                         double knn_above) {
  const Imputation simple = numeric ? Imputation::kMedian : Imputation::kMostFrequent;
  const double pct = 100.0 * p.missing_pct;
  if (p.missing_pct > knn_above) {
    return {Imputation::kKnn, fmt::format("{:.1f}% missing > 20%: KNN imputation, k=3", pct)};
  }
  if (p.missing_pct >= 0.10) {
    return {simple, fmt::format("{:.1f}% missing in [10%, 20%]: {} imputation", pct,
                                to_string(simple))};
  }
  if (p.missing_pct > 0.0) {
    return {simple, fmt::format("{:.1f}% missing < 10%: {} imputation (extends the "
                                "moderate-missingness rule downward)",
                                pct, to_string(simple))};
  }
  return {Imputation::kNone, "no missing values"};
}

PreprocessPlan build_plan(const perception::DatasetMetadata& metadata,
                          const SchemaMap& schema, const ToolDeciderConfig& config,
                          bool backup) {
  PreprocessPlan plan;
  plan.backup = backup;
  const bool large = metadata.estimated_memory_bytes > config.robust_above_bytes;
  const bool supervised = schema.chosen_target.has_value();
  const double knn_above = backup ? 2.0 : config.knn_above_missing;

  for (const auto& [name, role] : schema.roles) {
    if (schema.chosen_target && name == *schema.chosen_target) continue;
    const auto& p = metadata.profile(name);
    ColumnDirective d;
    d.column = name;
    d.role = role;
    switch (role) {
      case Role::kIdentifier:
        d.rationale = "identifier: passed through unchanged";
        break;
      case Role::kTimestamp:
        d.encoding = Encoding::kDrop;
        d.rationale = "timestamp: not used as a model input";
        break;
      case Role::kTargetCandidate:
        d.encoding = Encoding::kDrop;
        d.rationale = "alternative target column: excluded to avoid leakage";
        break;
      case Role::kFeatureNumeric: {
        const Choice imp = choose_imputation(p, true, knn_above);
        d.imputation = imp.imputation;
        if (backup || !large) {
          d.scaling = Scaling::kStandard;
        } else {
          d.scaling = Scaling::kRobust;
        }
        d.rationale = imp.why + "; " +
                      (d.scaling == Scaling::kRobust
                           ? fmt::format("dataset ~{:.1f} MB > 100 MB: robust scaling",
                                         static_cast<double>(metadata.estimated_memory_bytes) /
                                             (1u << 20))
                           : std::string("standard scaling"));
        break;
      }
      case Role::kFeatureCategorical: {
        if (p.unique_count > config.max_one_hot_levels) {
          if (supervised && !backup) {
            const Choice imp = choose_imputation(p, false, knn_above);
            d.imputation = imp.imputation;
            d.encoding = Encoding::kTargetEncoding;
            d.rationale = imp.why + fmt::format("; {} categories > 50 with a supervised target: "
                                                "target encoding", p.unique_count);
          } else {
            d.encoding = Encoding::kDrop;
            d.rationale = fmt::format("{} categories > 50 and {}: dropped", p.unique_count,
                                      backup ? "backup plan" : "no supervised target");
          }
        } else {
          const Choice imp = choose_imputation(p, false, knn_above);
          d.imputation = imp.imputation;
          d.encoding = Encoding::kOneHot;
          d.rationale = imp.why + fmt::format("; {} categories <= 50: one-hot encoding",
                                              p.unique_count);
        }
        break;
      }
    }
    plan.directives.push_back(std::move(d));
  }
  return plan;
}

}  // namespace

PreprocessPlan decide_tools(const perception::DatasetMetadata& metadata,
                            const SchemaMap& schema, const ToolDeciderConfig& config) {
  return build_plan(metadata, schema, config, false);
}

PreprocessPlan backup_plan(const perception::DatasetMetadata& metadata,
                           const SchemaMap& schema, const ToolDeciderConfig& config) {
  return build_plan(metadata, schema, config, true);
}

PreprocessPlan apply_feature_removals(PreprocessPlan plan, const FeatureReport& report) {
  for (auto& d : plan.directives) {
    for (const auto& r : report.removed) {
      if (r.column != d.column) continue;
      d.imputation = Imputation::kNone;
      d.scaling = Scaling::kNone;
      d.encoding = Encoding::kDrop;
      d.rationale = fmt::format("removed by feature analysis ({}): {}", to_string(r.reason),
                                r.detail);
    }
  }
  return plan;
}

}  // namespace rxm::preprocessing
