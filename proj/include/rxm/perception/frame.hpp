#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace rxm::perception {

struct Missing {
  bool operator==(const Missing&) const = default;
};

// One CSV cell: empty field, number, or any other text.
using Cell = std::variant<Missing, double, std::string>;

inline bool is_missing(const Cell& c) { return std::holds_alternative<Missing>(c); }
inline bool is_number(const Cell& c) { return std::holds_alternative<double>(c); }
inline bool is_text(const Cell& c) { return std::holds_alternative<std::string>(c); }

// Renders a cell the way it would appear in a CSV field.
std::string cell_to_string(const Cell& c);

using Column = std::vector<Cell>;

class DatasetFrame {
 public:
  DatasetFrame() = default;

  // Names are trimmed; throws Error(kInvalidArgument) on duplicate names or
  // ragged columns.
  DatasetFrame(std::vector<std::string> column_names,
               std::vector<Column> columns);

  const std::vector<std::string>& column_names() const { return names_; }
  const std::vector<Column>& columns() const { return columns_; }
  const Column& column(std::size_t index) const { return columns_.at(index); }
  std::optional<std::size_t> find(const std::string& name) const;
  const Column& column(const std::string& name) const;

  std::size_t n_rows() const { return n_rows_; }
  std::size_t n_cols() const { return names_.size(); }
  bool empty() const { return n_rows_ == 0 || names_.empty(); }

  const Cell& at(std::size_t row, std::size_t col) const {
    return columns_[col][row];
  }

 private:
  std::vector<std::string> names_;
  std::vector<Column> columns_;
  std::size_t n_rows_ = 0;
};

}  // namespace rxm::perception
