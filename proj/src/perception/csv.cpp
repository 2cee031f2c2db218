#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "rxm/core/error.hpp"
#include "rxm/perception/perception.hpp"

namespace rxm::perception {

namespace {

std::string_view trim_view(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
    s.remove_prefix(1);
  }
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
    s.remove_suffix(1);
  }
  return s;
}

struct Field {
  std::string text;
  bool quoted = false;
};

// Splits text into records of fields. Quoted fields may span lines and use
// "" as an escaped quote. Blank lines are skipped.
std::vector<std::vector<Field>> split_records(std::string_view text,
                                              char delimiter) {
  std::vector<std::vector<Field>> records;
  std::vector<Field> record;
  Field field;
  bool in_quotes = false;
  bool record_has_content = false;

  auto end_field = [&] {
    record.push_back(std::move(field));
    field = Field{};
  };
  auto end_record = [&] {
    if (record_has_content || !record.empty()) {
      end_field();
      records.push_back(std::move(record));
    }
    record.clear();
    field = Field{};
    record_has_content = false;
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    const char ch = text[i];
    if (in_quotes) {
      if (ch == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.text.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        field.text.push_back(ch);
      }
      continue;
    }
    if (ch == '"' && trim_view(field.text).empty()) {
      field.text.clear();
      field.quoted = true;
      in_quotes = true;
      record_has_content = true;
    } else if (ch == delimiter) {
      end_field();
      record_has_content = true;
    } else if (ch == '\n' || ch == '\r') {
      if (ch == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
      end_record();
    } else {
      field.text.push_back(ch);
      if (!std::isspace(static_cast<unsigned char>(ch))) {
        record_has_content = true;
      }
    }
  }
  if (in_quotes) {
    throw Error(ErrorCode::kMalformedCsv,
                fmt::format("unterminated quoted field in record {}",
                            records.size() + 1));
  }
  end_record();
  return records;
}

Cell to_cell(const Field& field) {
  const std::string_view trimmed = trim_view(field.text);
  if (trimmed.empty()) return Missing{};
  if (auto number = parse_number(trimmed)) return *number;
  return field.quoted ? field.text : std::string(trimmed);
}

bool digits(std::string_view s, std::size_t pos, std::size_t count) {
  if (pos + count > s.size()) return false;
  for (std::size_t i = pos; i < pos + count; ++i) {
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
  }
  return true;
}

int to_int(std::string_view s, std::size_t pos, std::size_t count) {
  int value = 0;
  std::from_chars(s.data() + pos, s.data() + pos + count, value);
  return value;
}

bool valid_date(int year, int month, int day) {
  return year >= 1000 && month >= 1 && month <= 12 && day >= 1 && day <= 31;
}

// HH:MM[:SS[.fff]][Z]
bool valid_time(std::string_view s) {
  if (!digits(s, 0, 2) || s.size() < 5 || s[2] != ':' || !digits(s, 3, 2)) {
    return false;
  }
  if (to_int(s, 0, 2) > 23 || to_int(s, 3, 2) > 59) return false;
  std::size_t pos = 5;
  if (pos < s.size() && s[pos] == ':') {
    if (!digits(s, pos + 1, 2) || to_int(s, pos + 1, 2) > 60) return false;
    pos += 3;
    if (pos < s.size() && s[pos] == '.') {
      ++pos;
      const std::size_t start = pos;
      while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) {
        ++pos;
      }
      if (pos == start) return false;
    }
  }
  if (pos < s.size() && s[pos] == 'Z') ++pos;
  return pos == s.size();
}

}  // namespace

std::optional<double> parse_number(std::string_view field) {
  std::string_view s = trim_view(field);
  if (s.empty()) return std::nullopt;
  if (s.front() == '+') s.remove_prefix(1);
  if (s.empty()) return std::nullopt;
  const char first = s.front();
  if (!(std::isdigit(static_cast<unsigned char>(first)) || first == '-' ||
        first == '.')) {
    return std::nullopt;
  }
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(value)) {
    return std::nullopt;
  }
  return value;
}

bool looks_like_datetime(std::string_view field) {
  const std::string_view s = trim_view(field);
  // YYYY-MM-DD or YYYY/MM/DD
  if (digits(s, 0, 4) && s.size() >= 10 && (s[4] == '-' || s[4] == '/') &&
      s[7] == s[4] && digits(s, 5, 2) && digits(s, 8, 2)) {
    if (!valid_date(to_int(s, 0, 4), to_int(s, 5, 2), to_int(s, 8, 2))) {
      return false;
    }
    if (s.size() == 10) return true;
    if (s[10] != ' ' && s[10] != 'T') return false;
    return valid_time(s.substr(11));
  }
  // MM/DD/YYYY
  if (digits(s, 0, 2) && s.size() >= 10 && s[2] == '/' && s[5] == '/' &&
      digits(s, 3, 2) && digits(s, 6, 4)) {
    if (!valid_date(to_int(s, 6, 4), to_int(s, 0, 2), to_int(s, 3, 2))) {
      return false;
    }
    if (s.size() == 10) return true;
    if (s[10] != ' ') return false;
    return valid_time(s.substr(11));
  }
  return false;
}

DatasetFrame parse_csv(std::string_view text, char delimiter) {
  if (text.size() >= 3 && text.substr(0, 3) == "\xEF\xBB\xBF") {
    text.remove_prefix(3);
  }
  const auto records = split_records(text, delimiter);
  if (records.empty()) {
    throw Error(ErrorCode::kMalformedCsv, "CSV has no header row");
  }
  std::vector<std::string> names;
  names.reserve(records.front().size());
  for (const auto& f : records.front()) names.emplace_back(trim_view(f.text));

  const std::size_t width = names.size();
  std::vector<Column> columns(width);
  for (auto& c : columns) c.reserve(records.size() - 1);
  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& record = records[r];
    if (record.size() != width) {
      throw Error(ErrorCode::kMalformedCsv,
                  fmt::format("row {} has {} fields, header has {}", r,
                              record.size(), width));
    }
    for (std::size_t c = 0; c < width; ++c) {
      columns[c].push_back(to_cell(record[c]));
    }
  }
  try {
    return DatasetFrame(std::move(names), std::move(columns));
  } catch (const Error& e) {
    throw Error(ErrorCode::kMalformedCsv, e.what());
  }
}

DatasetFrame load_csv(const std::filesystem::path& path, char delimiter,
                      bool header) {
  if (!header) {
    throw Error(ErrorCode::kInvalidArgument,
                "CSV input must have a header row");
  }
  std::error_code ec;
  if (!std::filesystem::is_regular_file(path, ec)) {
    throw Error(ErrorCode::kFileNotFound,
                fmt::format("dataset file not found: '{}'. Check the --data "
                            "path and that the file is readable.",
                            path.string()));
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::kFileNotFound,
                fmt::format("cannot open dataset file '{}' for reading",
                            path.string()));
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  try {
    return parse_csv(buffer.str(), delimiter);
  } catch (const Error& e) {
    throw Error(e.code(), fmt::format("{}: {}", path.string(), e.what()));
  }
}

}  // namespace rxm::perception
