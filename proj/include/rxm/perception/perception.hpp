#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "rxm/perception/frame.hpp"

namespace rxm::perception {

// Reads a delimiter-separated file whose first row is the header. Fields are
// double-quoted when they contain the delimiter, quotes or newlines; an empty
// field is missing. Numeric-looking fields become numbers.
//
// Throws Error(kFileNotFound) naming the path, Error(kMalformedCsv) naming the
// offending record, and Error(kInvalidArgument) when header == false.
DatasetFrame load_csv(const std::filesystem::path& path, char delimiter = ',',
                      bool header = true);

// Same parser over in-memory text.
DatasetFrame parse_csv(std::string_view text, char delimiter = ',');

// Strict number parse of a whole trimmed field ("1e3", "-2.5", "+4").
// Rejects inf/nan spellings.
std::optional<double> parse_number(std::string_view field);

// Accepts ISO-like dates with optional time ("2024-01-31", "2024/01/31
// 08:15", "2024-01-31T08:15:00Z") and US-style "01/31/2024".
bool looks_like_datetime(std::string_view field);

enum class DType { kNumeric, kCategorical, kDatetime, kConstant };

std::string_view to_string(DType dtype);

struct ColumnProfile {
  std::string name;
  DType inferred_dtype = DType::kCategorical;
  std::size_t missing_count = 0;
  double missing_pct = 0.0;
  std::size_t unique_count = 0;
  double uniqueness_ratio = 0.0;
  // Text cells in a numeric column; counted as missing.
  std::size_t parse_failure_count = 0;
  // Whether the non-missing values are numbers (numeric, or a constant
  // number).
  bool numeric_values = false;
  bool all_integer = false;
  std::optional<double> mean;
  std::optional<double> std;  // population
  std::optional<double> min;
  std::optional<double> max;

  std::size_t non_missing_count(std::size_t n_rows) const {
    return n_rows - missing_count;
  }

  bool operator==(const ColumnProfile&) const = default;
};

struct DatasetMetadata {
  std::size_t n_rows = 0;
  std::size_t n_cols = 0;
  std::vector<ColumnProfile> profiles;
  std::size_t estimated_memory_bytes = 0;
  std::size_t duplicate_row_count = 0;
  std::vector<std::vector<Cell>> preview;

  const ColumnProfile& profile(const std::string& name) const;

  bool operator==(const DatasetMetadata&) const = default;
};

// Fraction of non-missing cells that must be numbers for a numeric column.
inline constexpr double kNumericShare = 0.95;
// Fraction of non-missing text cells that must parse as dates.
inline constexpr double kDatetimeShare = 0.90;

// Throws Error(kEmptyFrame) when the frame has no rows or no columns.
DatasetMetadata inspect(const DatasetFrame& frame, std::size_t preview_rows = 5);

// Cell value as seen by a profiled column: parse failures in a numeric
// column read as missing.
std::optional<double> numeric_value(const Cell& cell);

enum class IssueKind {
  kHighMissingness,
  kConstantColumn,
  kDuplicateRows,
  kSuspiciousCardinality,
  kParseFailures,
};

std::string_view to_string(IssueKind kind);

struct QualityIssue {
  std::optional<std::string> column;
  IssueKind kind = IssueKind::kHighMissingness;
  std::string detail;

  bool operator==(const QualityIssue&) const = default;
};

struct QualityConfig {
  double max_missing_pct = 0.5;
  double max_categorical_uniqueness = 0.95;
};

// Sorted by (kind, column).
std::vector<QualityIssue> flag_quality_issues(const DatasetMetadata& metadata,
                                              const QualityConfig& config = {});

nlohmann::json to_json(const DatasetMetadata& metadata);
nlohmann::json to_json(const QualityIssue& issue);

}  // namespace rxm::perception
