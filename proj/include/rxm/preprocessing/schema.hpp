#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "rxm/core/error.hpp"
#include "rxm/perception/perception.hpp"

namespace rxm::preprocessing {

enum class Role {
  kIdentifier,
  kTimestamp,
  kTargetCandidate,
  kFeatureNumeric,
  kFeatureCategorical,
};

std::string_view to_string(Role role);

// Case-insensitive ECMAScript regexes matched against column names.
struct NamePatterns {
  std::vector<std::string> identifier{"^id$", "_id$", "^machine", "^serial", "^asset"};
  // Anchored at a word start so "Downtime_Cost" stays a feature.
  std::vector<std::string> timestamp{"(^|[^a-z])time", "(^|[^a-z])date", "stamp"};
  std::vector<std::string> target{"priority", "status", "failure", "target",
                                  "label", "quality", "efficiency"};
};

enum class AmbiguityPolicy {
  kThrow,     // raise AmbiguousTargetError
  kPickLast,  // choose the last matching column in frame order
  kLeaveUnset,
};

struct SchemaOptions {
  std::optional<std::string> target_hint;
  NamePatterns patterns;
  AmbiguityPolicy on_ambiguous = AmbiguityPolicy::kThrow;
  double identifier_uniqueness = 0.95;
};

struct SchemaMap {
  // Frame column order.
  std::vector<std::pair<std::string, Role>> roles;
  std::optional<std::string> chosen_target;
  std::map<std::string, std::string> evidence;

  Role role(const std::string& column) const;
  std::vector<std::string> columns_with(Role role) const;
  // feature_numeric and feature_categorical columns in frame order.
  std::vector<std::string> feature_columns() const;
  std::vector<std::string> target_candidates() const;
};

class AmbiguousTargetError : public Error {
 public:
  explicit AmbiguousTargetError(std::vector<std::string> candidates);
  const std::vector<std::string>& candidates() const { return candidates_; }

 private:
  std::vector<std::string> candidates_;
};

// Assigns exactly one role per column. Name patterns are checked before
// data-driven rules: identifier name, timestamp name, target name, date
// parseability, then uniqueness (categorical or integer columns).
SchemaMap discover_schema(const perception::DatasetFrame& frame,
                          const perception::DatasetMetadata& metadata,
                          const SchemaOptions& options = {});

// Unsupervised runs: every target candidate becomes a feature by dtype and
// no target is chosen.
SchemaMap demote_targets(SchemaMap schema,
                         const perception::DatasetMetadata& metadata);

// Text targets, or numeric targets with at most this many distinct values,
// are treated as class labels.
inline constexpr std::size_t kMaxClassLevels = 20;
bool is_discrete_target(const perception::ColumnProfile& profile);

nlohmann::json to_json(const SchemaMap& schema);

}  // namespace rxm::preprocessing
