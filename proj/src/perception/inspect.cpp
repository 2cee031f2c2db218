#include <algorithm>
#include <cmath>
#include <set>
#include <tuple>
#include <unordered_set>

#include <fmt/format.h>

#include "rxm/core/error.hpp"
#include "rxm/perception/perception.hpp"

namespace rxm::perception {

namespace {

std::string row_key(const DatasetFrame& frame, std::size_t row) {
  std::string key;
  for (std::size_t c = 0; c < frame.n_cols(); ++c) {
    const Cell& cell = frame.at(row, c);
    if (is_missing(cell)) {
      key += "\x01";
    } else if (is_number(cell)) {
      key += fmt::format("\x02{}", std::get<double>(cell));
    } else {
      key += "\x03" + std::get<std::string>(cell);
    }
    key += '\x1f';
  }
  return key;
}

ColumnProfile profile_column(const std::string& name, const Column& column) {
  ColumnProfile p;
  p.name = name;
  const std::size_t n = column.size();

  std::size_t empty = 0;
  std::size_t numbers = 0;
  std::size_t texts = 0;
  for (const Cell& cell : column) {
    if (is_missing(cell)) {
      ++empty;
    } else if (is_number(cell)) {
      ++numbers;
    } else {
      ++texts;
    }
  }
  const std::size_t present = numbers + texts;
  const bool numeric = present > 0 &&
                       static_cast<double>(numbers) >=
                           kNumericShare * static_cast<double>(present);

  if (numeric) {
    p.numeric_values = true;
    p.parse_failure_count = texts;
    p.missing_count = empty + texts;
    std::set<double> distinct;
    double sum = 0.0;
    bool all_integer = true;
    double lo = INFINITY;
    double hi = -INFINITY;
    for (const Cell& cell : column) {
      if (const auto* v = std::get_if<double>(&cell)) {
        distinct.insert(*v);
        sum += *v;
        lo = std::min(lo, *v);
        hi = std::max(hi, *v);
        if (std::floor(*v) != *v) all_integer = false;
      }
    }
    const double mean = sum / static_cast<double>(numbers);
    double ss = 0.0;
    for (const Cell& cell : column) {
      if (const auto* v = std::get_if<double>(&cell)) {
        ss += (*v - mean) * (*v - mean);
      }
    }
    p.unique_count = distinct.size();
    p.all_integer = all_integer;
    p.mean = mean;
    p.std = std::sqrt(ss / static_cast<double>(numbers));
    p.min = lo;
    p.max = hi;
    p.inferred_dtype = DType::kNumeric;
  } else {
    p.missing_count = empty;
    std::set<std::string> distinct;
    std::size_t dates = 0;
    for (const Cell& cell : column) {
      if (is_missing(cell)) continue;
      const std::string text = cell_to_string(cell);
      if (is_text(cell) && looks_like_datetime(text)) ++dates;
      distinct.insert(text);
    }
    p.unique_count = distinct.size();
    p.inferred_dtype =
        present > 0 && static_cast<double>(dates) >=
                           kDatetimeShare * static_cast<double>(present)
            ? DType::kDatetime
            : DType::kCategorical;
  }

  const std::size_t non_missing = n - p.missing_count;
  p.missing_pct = n == 0 ? 0.0
                         : static_cast<double>(p.missing_count) /
                               static_cast<double>(n);
  p.uniqueness_ratio = non_missing == 0
                           ? 0.0
                           : static_cast<double>(p.unique_count) /
                                 static_cast<double>(non_missing);
  if (p.unique_count <= 1) p.inferred_dtype = DType::kConstant;
  return p;
}

}  // namespace

std::string_view to_string(DType dtype) {
  switch (dtype) {
    case DType::kNumeric: return "numeric";
    case DType::kCategorical: return "categorical";
    case DType::kDatetime: return "datetime";
    case DType::kConstant: return "constant";
  }
  return "unknown";
}

std::string_view to_string(IssueKind kind) {
  switch (kind) {
    case IssueKind::kHighMissingness: return "high_missingness";
    case IssueKind::kConstantColumn: return "constant_column";
    case IssueKind::kDuplicateRows: return "duplicate_rows";
    case IssueKind::kSuspiciousCardinality: return "suspicious_cardinality";
    case IssueKind::kParseFailures: return "parse_failures";
  }
  return "unknown";
}

std::optional<double> numeric_value(const Cell& cell) {
  if (const auto* v = std::get_if<double>(&cell)) return *v;
  return std::nullopt;
}

const ColumnProfile& DatasetMetadata::profile(const std::string& name) const {
  for (const auto& p : profiles) {
    if (p.name == name) return p;
  }
  throw Error(ErrorCode::kMissingColumn, "no profile for column '" + name + "'");
}

DatasetMetadata inspect(const DatasetFrame& frame, std::size_t preview_rows) {
  if (frame.empty()) {
    throw Error(ErrorCode::kEmptyFrame,
                "dataset has no rows or no columns to inspect");
  }
  DatasetMetadata meta;
  meta.n_rows = frame.n_rows();
  meta.n_cols = frame.n_cols();
  meta.profiles.reserve(frame.n_cols());

  std::size_t numeric_columns = 0;
  std::size_t text_bytes = 0;
  for (std::size_t c = 0; c < frame.n_cols(); ++c) {
    meta.profiles.push_back(
        profile_column(frame.column_names()[c], frame.column(c)));
    if (meta.profiles.back().numeric_values) ++numeric_columns;
    for (const Cell& cell : frame.column(c)) {
      if (const auto* s = std::get_if<std::string>(&cell)) {
        text_bytes += s->size();
      }
    }
  }
  meta.estimated_memory_bytes = 8 * frame.n_rows() * numeric_columns + text_bytes;

  std::unordered_set<std::string> seen;
  seen.reserve(frame.n_rows());
  for (std::size_t r = 0; r < frame.n_rows(); ++r) {
    if (!seen.insert(row_key(frame, r)).second) ++meta.duplicate_row_count;
  }

  const std::size_t k = std::min(preview_rows, frame.n_rows());
  meta.preview.reserve(k);
  for (std::size_t r = 0; r < k; ++r) {
    std::vector<Cell> row;
    row.reserve(frame.n_cols());
    for (std::size_t c = 0; c < frame.n_cols(); ++c) row.push_back(frame.at(r, c));
    meta.preview.push_back(std::move(row));
  }
  return meta;
}

std::vector<QualityIssue> flag_quality_issues(const DatasetMetadata& metadata,
                                              const QualityConfig& config) {
  std::vector<QualityIssue> issues;
  for (const auto& p : metadata.profiles) {
    if (p.missing_pct > config.max_missing_pct) {
      issues.push_back({p.name, IssueKind::kHighMissingness,
                        fmt::format("{:.1f}% of values missing",
                                    100.0 * p.missing_pct)});
    }
    if (p.inferred_dtype == DType::kConstant) {
      issues.push_back({p.name, IssueKind::kConstantColumn,
                        fmt::format("{} distinct value(s)", p.unique_count)});
    }
    if (p.inferred_dtype == DType::kCategorical &&
        p.uniqueness_ratio > config.max_categorical_uniqueness) {
      issues.push_back({p.name, IssueKind::kSuspiciousCardinality,
                        fmt::format("{} distinct of {} non-missing values",
                                    p.unique_count,
                                    p.non_missing_count(metadata.n_rows))});
    }
    if (p.parse_failure_count > 0) {
      issues.push_back({p.name, IssueKind::kParseFailures,
                        fmt::format("{} non-numeric cell(s) treated as missing",
                                    p.parse_failure_count)});
    }
  }
  if (metadata.duplicate_row_count > 0) {
    issues.push_back({std::nullopt, IssueKind::kDuplicateRows,
                      fmt::format("{} duplicate row(s)",
                                  metadata.duplicate_row_count)});
  }
  std::stable_sort(issues.begin(), issues.end(),
                   [](const QualityIssue& a, const QualityIssue& b) {
                     return std::tie(a.kind, a.column) <
                            std::tie(b.kind, b.column);
                   });
  return issues;
}

nlohmann::json to_json(const ColumnProfile& p) {
  nlohmann::json j = {
      {"name", p.name},
      {"dtype", to_string(p.inferred_dtype)},
      {"missing_count", p.missing_count},
      {"missing_pct", p.missing_pct},
      {"unique_count", p.unique_count},
      {"uniqueness_ratio", p.uniqueness_ratio},
      {"parse_failures", p.parse_failure_count},
  };
  if (p.mean) {
    j["mean"] = *p.mean;
    j["std"] = *p.std;
    j["min"] = *p.min;
    j["max"] = *p.max;
  }
  return j;
}

nlohmann::json to_json(const DatasetMetadata& metadata) {
  nlohmann::json profiles = nlohmann::json::array();
  for (const auto& p : metadata.profiles) profiles.push_back(to_json(p));
  return {
      {"n_rows", metadata.n_rows},
      {"n_cols", metadata.n_cols},
      {"estimated_memory_bytes", metadata.estimated_memory_bytes},
      {"duplicate_rows", metadata.duplicate_row_count},
      {"columns", profiles},
  };
}

nlohmann::json to_json(const QualityIssue& issue) {
  return {
      {"column", issue.column ? nlohmann::json(*issue.column) : nlohmann::json()},
      {"kind", to_string(issue.kind)},
      {"detail", issue.detail},
  };
}

}  // namespace rxm::perception
