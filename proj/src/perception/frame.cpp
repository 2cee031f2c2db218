#include "rxm/perception/frame.hpp"

#include <set>

#include <fmt/format.h>

#include "rxm/core/error.hpp"

namespace rxm::perception {

namespace {

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

}  // namespace

std::string cell_to_string(const Cell& c) {
  if (const auto* d = std::get_if<double>(&c)) return fmt::format("{}", *d);
  if (const auto* s = std::get_if<std::string>(&c)) return *s;
  return {};
}

DatasetFrame::DatasetFrame(std::vector<std::string> column_names,
                           std::vector<Column> columns)
    : columns_(std::move(columns)) {
  if (column_names.size() != columns_.size()) {
    throw Error(ErrorCode::kInvalidArgument,
                "column name count does not match column count");
  }
  std::set<std::string> seen;
  names_.reserve(column_names.size());
  for (auto& raw : column_names) {
    std::string name = trim(std::move(raw));
    if (!seen.insert(name).second) {
      throw Error(ErrorCode::kInvalidArgument,
                  "duplicate column name '" + name + "'");
    }
    names_.push_back(std::move(name));
  }
  n_rows_ = columns_.empty() ? 0 : columns_.front().size();
  for (std::size_t i = 0; i < columns_.size(); ++i) {
    if (columns_[i].size() != n_rows_) {
      throw Error(ErrorCode::kInvalidArgument,
                  fmt::format("column '{}' has {} cells, expected {}",
                              names_[i], columns_[i].size(), n_rows_));
    }
  }
}

std::optional<std::size_t> DatasetFrame::find(const std::string& name) const {
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (names_[i] == name) return i;
  }
  return std::nullopt;
}

const Column& DatasetFrame::column(const std::string& name) const {
  const auto index = find(name);
  if (!index) {
    throw Error(ErrorCode::kMissingColumn, "no column named '" + name + "'");
  }
  return columns_[*index];
}

}  // namespace rxm::perception
