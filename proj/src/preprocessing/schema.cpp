#include "rxm/preprocessing/schema.hpp"

#include <algorithm>
#include <regex>

#include <fmt/format.h>
#include <fmt/ranges.h>

namespace rxm::preprocessing {

namespace {

using perception::DType;

bool matches_any(const std::string& name, const std::vector<std::string>& patterns) {
  return std::any_of(patterns.begin(), patterns.end(), [&](const std::string& p) {
    return std::regex_search(name, std::regex(p, std::regex::ECMAScript | std::regex::icase));
  });
}

Role feature_role(const perception::ColumnProfile& p) {
  return p.numeric_values ? Role::kFeatureNumeric : Role::kFeatureCategorical;
}

}  // namespace

std::string_view to_string(Role role) {
  switch (role) {
    case Role::kIdentifier: return "identifier";
    case Role::kTimestamp: return "timestamp";
    case Role::kTargetCandidate: return "target_candidate";
    case Role::kFeatureNumeric: return "feature_numeric";
    case Role::kFeatureCategorical: return "feature_categorical";
  }
  return "unknown";
}

AmbiguousTargetError::AmbiguousTargetError(std::vector<std::string> candidates)
    : Error(ErrorCode::kAmbiguousTarget,
            fmt::format("multiple target candidates [{}]; pass a target hint",
                        fmt::join(candidates, ", "))),
      candidates_(std::move(candidates)) {}

Role SchemaMap::role(const std::string& column) const {
  for (const auto& [name, r] : roles) {
    if (name == column) return r;
  }
  throw Error(ErrorCode::kMissingColumn, "column '" + column + "' has no role");
}

std::vector<std::string> SchemaMap::columns_with(Role wanted) const {
  std::vector<std::string> out;
  for (const auto& [name, r] : roles) {
    if (r == wanted) out.push_back(name);
  }
  return out;
}

std::vector<std::string> SchemaMap::feature_columns() const {
  std::vector<std::string> out;
  for (const auto& [name, r] : roles) {
    if (r == Role::kFeatureNumeric || r == Role::kFeatureCategorical) {
      out.push_back(name);
    }
  }
  return out;
}

std::vector<std::string> SchemaMap::target_candidates() const {
  return columns_with(Role::kTargetCandidate);
}

bool is_discrete_target(const perception::ColumnProfile& profile) {
  return !profile.numeric_values || profile.unique_count <= kMaxClassLevels;
}

SchemaMap discover_schema(const perception::DatasetFrame& frame,
                          const perception::DatasetMetadata& metadata,
                          const SchemaOptions& options) {
  if (metadata.profiles.size() != frame.n_cols()) {
    throw Error(ErrorCode::kInvalidArgument, "metadata does not describe this frame");
  }
  if (options.target_hint && !frame.find(*options.target_hint)) {
    throw Error(ErrorCode::kMissingColumn,
                "target column '" + *options.target_hint + "' not in dataset");
  }
  const NamePatterns& pat = options.patterns;
  SchemaMap schema;
  for (const auto& p : metadata.profiles) {
    Role role;
    std::string why;
    const bool integer_like = p.numeric_values && p.all_integer;
    const bool unique_enough = p.uniqueness_ratio >= options.identifier_uniqueness &&
                               (p.inferred_dtype == DType::kCategorical ||
                                (p.inferred_dtype == DType::kNumeric && integer_like));
    if (options.target_hint && p.name == *options.target_hint) {
      role = Role::kTargetCandidate;
      why = "target requested by user";
    } else if (matches_any(p.name, pat.identifier)) {
      role = Role::kIdentifier;
      why = "name matches identifier pattern";
    } else if (matches_any(p.name, pat.timestamp)) {
      role = Role::kTimestamp;
      why = "name matches timestamp pattern";
    } else if (matches_any(p.name, pat.target)) {
      role = Role::kTargetCandidate;
      why = "name matches target pattern";
    } else if (p.inferred_dtype == DType::kDatetime) {
      role = Role::kTimestamp;
      why = fmt::format("at least {:.0f}% of values parse as dates",
                        100.0 * perception::kDatetimeShare);
    } else if (unique_enough) {
      role = Role::kIdentifier;
      why = fmt::format("uniqueness ratio {:.3f} >= {:.2f}", p.uniqueness_ratio,
                        options.identifier_uniqueness);
    } else {
      role = feature_role(p);
      why = fmt::format("{} feature", perception::to_string(p.inferred_dtype));
    }
    schema.roles.emplace_back(p.name, role);
    schema.evidence[p.name] = std::move(why);
  }

  if (options.target_hint) {
    schema.chosen_target = options.target_hint;
    return schema;
  }
  const auto candidates = schema.target_candidates();
  if (candidates.size() == 1) {
    schema.chosen_target = candidates.front();
  } else if (candidates.size() > 1) {
    switch (options.on_ambiguous) {
      case AmbiguityPolicy::kThrow:
        throw AmbiguousTargetError(candidates);
      case AmbiguityPolicy::kPickLast:
        schema.chosen_target = candidates.back();
        schema.evidence[candidates.back()] +=
            "; chosen by rule as the last of several target candidates";
        break;
      case AmbiguityPolicy::kLeaveUnset:
        break;
    }
  }
  return schema;
}

SchemaMap demote_targets(SchemaMap schema,
                         const perception::DatasetMetadata& metadata) {
  for (auto& [name, role] : schema.roles) {
    if (role != Role::kTargetCandidate) continue;
    role = feature_role(metadata.profile(name));
    schema.evidence[name] += "; used as a feature (no supervised target)";
  }
  schema.chosen_target.reset();
  return schema;
}

nlohmann::json to_json(const SchemaMap& schema) {
  nlohmann::json roles = nlohmann::json::object();
  for (const auto& [name, role] : schema.roles) roles[name] = to_string(role);
  return {
      {"roles", roles},
      {"chosen_target", schema.chosen_target ? nlohmann::json(*schema.chosen_target)
                                             : nlohmann::json()},
      {"evidence", schema.evidence},
  };
}

}  // namespace rxm::preprocessing
