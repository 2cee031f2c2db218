#include "rxm/preprocessing/features.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <fmt/format.h>

#include "rxm/analytics/models/tree.hpp"

namespace rxm::preprocessing {

namespace {

using perception::Cell;
using perception::DType;
using OptVec = std::vector<std::optional<double>>;
using Codes = std::vector<std::optional<std::size_t>>;

OptVec numeric_column(const perception::Column& column) {
  OptVec out;
  out.reserve(column.size());
  for (const Cell& c : column) out.push_back(perception::numeric_value(c));
  return out;
}

Codes category_codes(const perception::Column& column) {
  std::set<std::string> vocab;
  for (const Cell& c : column) {
    if (!perception::is_missing(c)) vocab.insert(perception::cell_to_string(c));
  }
  const std::vector<std::string> sorted(vocab.begin(), vocab.end());
  Codes out;
  out.reserve(column.size());
  for (const Cell& c : column) {
    if (perception::is_missing(c)) {
      out.emplace_back();
    } else {
      const auto it = std::lower_bound(sorted.begin(), sorted.end(),
                                       perception::cell_to_string(c));
      out.emplace_back(static_cast<std::size_t>(it - sorted.begin()));
    }
  }
  return out;
}

// Median-filled numeric values or category codes, for the importance forest.
std::vector<double> dense_encoding(const perception::Column& column, bool numeric) {
  std::vector<double> out(column.size());
  if (numeric) {
    std::vector<double> present;
    for (const Cell& c : column) {
      if (auto v = perception::numeric_value(c)) present.push_back(*v);
    }
    double fill = 0.0;
    if (!present.empty()) {
      std::sort(present.begin(), present.end());
      fill = present[present.size() / 2];
    }
    for (std::size_t i = 0; i < column.size(); ++i) {
      out[i] = perception::numeric_value(column[i]).value_or(fill);
    }
  } else {
    const Codes codes = category_codes(column);
    for (std::size_t i = 0; i < codes.size(); ++i) {
      out[i] = codes[i] ? static_cast<double>(*codes[i]) : -1.0;
    }
  }
  return out;
}

}  // namespace

std::string_view to_string(RemovalReason reason) {
  switch (reason) {
    case RemovalReason::kConstant: return "constant";
    case RemovalReason::kRedundant: return "redundant";
    case RemovalReason::kHighCardinalityUnencodable: return "high_cardinality_unencodable";
  }
  return "unknown";
}

std::optional<double> FeatureReport::correlation(const std::string& a,
                                                 const std::string& b) const {
  for (const auto& c : pearson_correlations) {
    if ((c.first == a && c.second == b) || (c.first == b && c.second == a)) return c.r;
  }
  return std::nullopt;
}

bool FeatureReport::is_removed(const std::string& column) const {
  return std::any_of(removed.begin(), removed.end(),
                     [&](const RemovedFeature& r) { return r.column == column; });
}

std::optional<double> pearson(const OptVec& a, const OptVec& b) {
  double n = 0.0, sa = 0.0, sb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!a[i] || !b[i]) continue;
    n += 1.0;
    sa += *a[i];
    sb += *b[i];
  }
  if (n < 2.0) return std::nullopt;
  const double ma = sa / n;
  const double mb = sb / n;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!a[i] || !b[i]) continue;
    const double da = *a[i] - ma;
    const double db = *b[i] - mb;
    sab += da * db;
    saa += da * da;
    sbb += db * db;
  }
  if (saa <= 0.0 || sbb <= 0.0) return std::nullopt;
  return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

Codes equal_frequency_bins(const OptVec& values, std::size_t bins) {
  std::vector<double> sorted;
  for (const auto& v : values) {
    if (v) sorted.push_back(*v);
  }
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> cuts;
  const std::size_t m = sorted.size();
  for (std::size_t k = 1; k < bins && m > 0; ++k) cuts.push_back(sorted[k * m / bins]);
  Codes out;
  out.reserve(values.size());
  for (const auto& v : values) {
    if (!v) {
      out.emplace_back();
    } else {
      out.emplace_back(static_cast<std::size_t>(
          std::upper_bound(cuts.begin(), cuts.end(), *v) - cuts.begin()));
    }
  }
  return out;
}

double plugin_mutual_information(const Codes& a, const Codes& b) {
  std::map<std::pair<std::size_t, std::size_t>, double> joint;
  std::map<std::size_t, double> pa;
  std::map<std::size_t, double> pb;
  double n = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!a[i] || !b[i]) continue;
    joint[{*a[i], *b[i]}] += 1.0;
    pa[*a[i]] += 1.0;
    pb[*b[i]] += 1.0;
    n += 1.0;
  }
  if (n == 0.0) return 0.0;
  double mi = 0.0;
  for (const auto& [key, count] : joint) {
    mi += count / n * std::log(count * n / (pa[key.first] * pb[key.second]));
  }
  return std::max(0.0, mi);
}

FeatureReport analyze_features(const perception::DatasetFrame& frame,
                               const perception::DatasetMetadata& metadata,
                               const SchemaMap& schema,
                               const FeatureAnalysisConfig& config) {
  const auto features = schema.feature_columns();
  if (features.empty()) {
    throw Error(ErrorCode::kNoFeatures, "schema has no feature columns to analyze");
  }
  FeatureReport report;

  std::vector<std::string> numeric;
  std::map<std::string, OptVec> numeric_values;
  for (const auto& name : features) {
    if (schema.role(name) == Role::kFeatureNumeric) {
      numeric.push_back(name);
      numeric_values[name] = numeric_column(frame.column(name));
    }
  }
  for (std::size_t i = 0; i < numeric.size(); ++i) {
    for (std::size_t j = i + 1; j < numeric.size(); ++j) {
      const auto r = pearson(numeric_values[numeric[i]], numeric_values[numeric[j]]);
      if (r) report.pearson_correlations.push_back({numeric[i], numeric[j], *r});
    }
  }

  std::optional<Codes> target_codes;
  bool discrete_target = false;
  if (schema.chosen_target) {
    const auto& target_profile = metadata.profile(*schema.chosen_target);
    const auto& target_column = frame.column(*schema.chosen_target);
    discrete_target = is_discrete_target(target_profile);
    target_codes = discrete_target
                       ? category_codes(target_column)
                       : equal_frequency_bins(numeric_column(target_column), config.mi_bins);
    for (const auto& name : features) {
      const Codes codes = schema.role(name) == Role::kFeatureNumeric
                              ? equal_frequency_bins(numeric_values[name], config.mi_bins)
                              : category_codes(frame.column(name));
      report.mutual_information[name] = plugin_mutual_information(codes, *target_codes);
    }

    // Importance forest over rows with a present target.
    std::vector<std::size_t> rows;
    for (std::size_t r = 0; r < frame.n_rows(); ++r) {
      if ((*target_codes)[r]) rows.push_back(r);
    }
    if (rows.size() >= 2) {
      analytics::Matrix x(static_cast<Eigen::Index>(rows.size()),
                          static_cast<Eigen::Index>(features.size()));
      for (std::size_t f = 0; f < features.size(); ++f) {
        const auto dense = dense_encoding(frame.column(features[f]),
                                          schema.role(features[f]) == Role::kFeatureNumeric);
        for (std::size_t i = 0; i < rows.size(); ++i) {
          x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(f)) = dense[rows[i]];
        }
      }
      std::vector<double> y(rows.size());
      std::size_t n_classes = 0;
      const OptVec target_numeric = numeric_column(frame.column(*schema.chosen_target));
      for (std::size_t i = 0; i < rows.size(); ++i) {
        if (discrete_target) {
          y[i] = static_cast<double>(*(*target_codes)[rows[i]]);
          n_classes = std::max(n_classes, *(*target_codes)[rows[i]] + 1);
        } else {
          y[i] = *target_numeric[rows[i]];
        }
      }
      analytics::ForestParams fp;
      fp.task = discrete_target ? analytics::TreeTask::kClassification
                                : analytics::TreeTask::kRegression;
      fp.n_classes = n_classes;
      fp.n_estimators = config.importance_trees;
      fp.max_depth = config.importance_depth;
      fp.sample_fraction = config.importance_subsample;
      fp.seed = config.seed;
      analytics::RandomForest forest(fp);
      forest.fit(x, y);
      const auto imp = forest.feature_importances();
      std::map<std::string, double> importances;
      for (std::size_t f = 0; f < features.size(); ++f) importances[features[f]] = imp[f];
      report.importances = std::move(importances);
    }
  }

  for (const auto& name : features) {
    const auto& p = metadata.profile(name);
    if (p.inferred_dtype == DType::kConstant) {
      report.removed.push_back({name, RemovalReason::kConstant,
                                fmt::format("{} distinct value(s)", p.unique_count)});
    } else if (schema.role(name) == Role::kFeatureCategorical &&
               p.unique_count > config.max_one_hot_levels && !schema.chosen_target) {
      report.removed.push_back(
          {name, RemovalReason::kHighCardinalityUnencodable,
           fmt::format("{} categories and no supervised target for target encoding",
                       p.unique_count)});
    }
  }
  for (const auto& c : report.pearson_correlations) {
    if (std::abs(c.r) <= config.redundancy_r) continue;
    if (report.is_removed(c.first) || report.is_removed(c.second)) continue;
    const double mi_first = report.mutual_information.count(c.first)
                                ? report.mutual_information.at(c.first) : 0.0;
    const double mi_second = report.mutual_information.count(c.second)
                                 ? report.mutual_information.at(c.second) : 0.0;
    // pearson_correlations holds pairs in column order, so `second` is later.
    const std::string& drop = mi_first < mi_second ? c.first : c.second;
    const std::string& keep = drop == c.first ? c.second : c.first;
    report.removed.push_back(
        {drop, RemovalReason::kRedundant,
         fmt::format("|r|={:.4f} with '{}' and lower mutual information", std::abs(c.r), keep)});
  }
  for (const auto& name : features) {
    if (!report.is_removed(name)) report.kept.push_back(name);
  }
  return report;
}

nlohmann::json to_json(const FeatureReport& report) {
  nlohmann::json corr = nlohmann::json::array();
  for (const auto& c : report.pearson_correlations) {
    corr.push_back({{"a", c.first}, {"b", c.second}, {"r", c.r}});
  }
  nlohmann::json removed = nlohmann::json::array();
  for (const auto& r : report.removed) {
    removed.push_back({{"column", r.column}, {"reason", to_string(r.reason)}, {"detail", r.detail}});
  }
  return {
      {"pearson", corr},
      {"mutual_information", report.mutual_information},
      {"importances", report.importances ? nlohmann::json(*report.importances) : nlohmann::json()},
      {"removed", removed},
      {"kept", report.kept},
  };
}

}  // namespace rxm::preprocessing
