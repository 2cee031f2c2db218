#include "rxm/preprocessing/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include <fmt/format.h>

#include "rxm/core/error.hpp"

namespace rxm::preprocessing {

namespace {

using perception::Cell;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

bool kept(const ColumnDirective& d) {
  return d.encoding != Encoding::kDrop &&
         (d.role == Role::kFeatureNumeric || d.role == Role::kFeatureCategorical);
}

std::optional<std::string> category(const Cell& cell) {
  if (perception::is_missing(cell)) return std::nullopt;
  return perception::cell_to_string(cell);
}

double population_std(const std::vector<double>& v, double mean) {
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(v.size()));
}

struct Neighbor {
  double distance;
  std::size_t train_index;
  bool operator<(const Neighbor& o) const {
    return distance < o.distance ||
           (distance == o.distance && train_index < o.train_index);
  }
};

class Imputer {
 public:
  Imputer(const FittedPipeline& pipeline, const perception::DatasetFrame& frame)
      : pipeline_(pipeline), frame_(frame) {
    if (pipeline.knn) {
      for (const auto& name : pipeline.knn->distance_columns) {
        distance_sources_.push_back(&frame.column(name));
      }
    }
  }

  Cell impute(const FittedColumn& col, std::size_t row) const {
    if (col.directive.imputation == Imputation::kKnn && pipeline_.knn) {
      if (auto v = knn(col, row)) return *v;
    }
    if (col.numeric) return col.median;
    return col.mode;
  }

 private:
  std::optional<Cell> knn(const FittedColumn& col, std::size_t row) const {
    const KnnIndex& index = *pipeline_.knn;
    const auto& train_values = index.values.at(col.directive.column);
    const std::size_t dims = index.distance_columns.size();
    std::vector<double> query(dims, kNaN);
    for (std::size_t d = 0; d < dims; ++d) {
      if (index.distance_columns[d] == col.directive.column) continue;
      if (auto v = perception::numeric_value((*distance_sources_[d])[row])) {
        query[d] = (*v - index.means[d]) / index.stds[d];
      }
    }
    std::vector<Neighbor> best;
    for (std::size_t t = 0; t < train_values.size(); ++t) {
      const Cell& value = train_values[t];
      if (col.numeric ? !perception::is_number(value) : perception::is_missing(value)) {
        continue;
      }
      double dist = 0.0;
      for (std::size_t d = 0; d < dims; ++d) {
        const double s = index.scaled(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(d));
        if (std::isnan(query[d]) || std::isnan(s)) continue;
        dist += (query[d] - s) * (query[d] - s);
      }
      best.push_back({dist, t});
      std::push_heap(best.begin(), best.end());
      if (best.size() > kKnnNeighbors) {
        std::pop_heap(best.begin(), best.end());
        best.pop_back();
      }
    }
    if (best.empty()) return std::nullopt;
    if (col.numeric) {
      double sum = 0.0;
      for (const auto& n : best) sum += std::get<double>(train_values[n.train_index]);
      return sum / static_cast<double>(best.size());
    }
    std::vector<std::string> votes;
    for (const auto& n : best) votes.push_back(perception::cell_to_string(train_values[n.train_index]));
    return mode_of(votes);
  }

  const FittedPipeline& pipeline_;
  const perception::DatasetFrame& frame_;
  std::vector<const perception::Column*> distance_sources_;
};

}  // namespace

double quantile_sorted(std::span<const double> sorted, double q) {
  if (sorted.empty()) return 0.0;
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

double median_of(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  return quantile_sorted(values, 0.5);
}

std::string mode_of(const std::vector<std::string>& values) {
  std::map<std::string, std::size_t> counts;
  for (const auto& v : values) ++counts[v];
  std::string best;
  std::size_t best_count = 0;
  for (const auto& [value, count] : counts) {
    if (count > best_count) {
      best = value;
      best_count = count;
    }
  }
  return best;
}

const FittedColumn* FittedPipeline::find(const std::string& column) const {
  for (const auto& c : columns) {
    if (c.directive.column == column) return &c;
  }
  return nullptr;
}

FittedPipeline fit_pipeline(const perception::DatasetFrame& frame,
                            const PreprocessPlan& plan, const SchemaMap& schema,
                            std::span<const std::size_t> train_rows) {
  if (train_rows.empty()) {
    throw Error(ErrorCode::kEmptyTrainSet, "preprocessing pipeline needs training rows");
  }
  for (std::size_t r : train_rows) {
    if (r >= frame.n_rows()) {
      throw Error(ErrorCode::kInvalidArgument, fmt::format("training row {} out of range", r));
    }
  }
  FittedPipeline fp;
  fp.train_rows = train_rows.size();
  fp.target_name = schema.chosen_target;

  std::vector<double> encoded_target(train_rows.size(), kNaN);
  if (schema.chosen_target) {
    const auto& target = frame.column(*schema.chosen_target);
    // Discreteness and the class list describe the whole column, so a class
    // seen only in evaluation rows still has a code.
    std::size_t present = 0;
    std::size_t numbers = 0;
    for (const Cell& cell : target) {
      if (perception::is_missing(cell)) continue;
      ++present;
      if (perception::is_number(cell)) ++numbers;
    }
    const bool numeric_target =
        present > 0 && static_cast<double>(numbers) >=
                           perception::kNumericShare * static_cast<double>(present);
    // Text in a numeric target is a parse failure and reads as missing.
    std::set<std::string> classes;
    for (const Cell& cell : target) {
      if (numeric_target ? perception::is_number(cell) : !perception::is_missing(cell)) {
        classes.insert(perception::cell_to_string(cell));
      }
    }
    fp.target_discrete = !numeric_target || classes.size() <= kMaxClassLevels;
    if (fp.target_discrete) fp.target_classes.assign(classes.begin(), classes.end());
    for (std::size_t i = 0; i < train_rows.size(); ++i) {
      const Cell& cell = target[train_rows[i]];
      if (fp.target_discrete) {
        if (numeric_target && !perception::is_number(cell)) continue;
        if (auto c = category(cell)) {
          encoded_target[i] = static_cast<double>(
              std::lower_bound(fp.target_classes.begin(), fp.target_classes.end(), *c) -
              fp.target_classes.begin());
        }
      } else if (auto v = perception::numeric_value(cell)) {
        encoded_target[i] = *v;
      }
    }
  }

  bool any_knn = false;
  for (const auto& d : plan.directives) {
    if (schema.chosen_target && d.column == *schema.chosen_target) {
      throw Error(ErrorCode::kInvalidArgument, "plan carries a directive for the target");
    }
    FittedColumn col;
    col.directive = d;
    if (d.role == Role::kIdentifier) {
      fp.identifier_columns.push_back(d.column);
      fp.columns.push_back(std::move(col));
      continue;
    }
    if (!kept(d)) {
      fp.columns.push_back(std::move(col));
      continue;
    }
    const auto& cells = frame.column(d.column);
    if (d.imputation == Imputation::kKnn) any_knn = true;
    if (d.role == Role::kFeatureNumeric) {
      col.numeric = true;
      std::vector<double> values;
      for (std::size_t r : train_rows) {
        if (auto v = perception::numeric_value(cells[r])) values.push_back(*v);
      }
      std::sort(values.begin(), values.end());
      col.median = quantile_sorted(values, 0.5);
      if (!values.empty()) {
        if (d.scaling == Scaling::kStandard) {
          double sum = 0.0;
          for (double v : values) sum += v;
          col.center = sum / static_cast<double>(values.size());
          col.spread = population_std(values, col.center);
        } else if (d.scaling == Scaling::kRobust) {
          col.center = quantile_sorted(values, 0.5);
          col.spread = quantile_sorted(values, 0.75) - quantile_sorted(values, 0.25);
        }
      }
      if (d.scaling != Scaling::kNone && !(col.spread > 0.0)) {
        col.spread = 1.0;
        col.degenerate = true;
      }
      col.output_names = {d.column};
    } else {
      std::vector<std::string> values;
      for (std::size_t r : train_rows) {
        if (auto c = category(cells[r])) values.push_back(*c);
      }
      col.mode = mode_of(values);
      if (d.encoding == Encoding::kOneHot) {
        std::set<std::string> vocab(values.begin(), values.end());
        col.vocabulary.assign(vocab.begin(), vocab.end());
        for (const auto& v : col.vocabulary) col.output_names.push_back(d.column + "=" + v);
        if (col.vocabulary.size() <= 1) col.degenerate = true;
      } else if (d.encoding == Encoding::kTargetEncoding) {
        std::map<std::string, std::pair<double, std::size_t>> sums;
        double total = 0.0;
        std::size_t count = 0;
        for (std::size_t i = 0; i < train_rows.size(); ++i) {
          if (std::isnan(encoded_target[i])) continue;
          total += encoded_target[i];
          ++count;
          if (auto c = category(cells[train_rows[i]])) {
            sums[*c].first += encoded_target[i];
            ++sums[*c].second;
          }
        }
        col.global_target_mean = count > 0 ? total / static_cast<double>(count) : 0.0;
        for (const auto& [cat, s] : sums) {
          col.target_means[cat] = s.first / static_cast<double>(s.second);
        }
        col.output_names = {d.column};
      } else {
        col.output_names = {d.column};
      }
    }
    for (const auto& n : col.output_names) fp.output_columns.push_back(n);
    fp.columns.push_back(std::move(col));
  }

  if (any_knn) {
    KnnIndex index;
    for (const auto& c : fp.columns) {
      if (c.numeric && kept(c.directive)) index.distance_columns.push_back(c.directive.column);
    }
    const auto n = static_cast<Eigen::Index>(train_rows.size());
    index.scaled = Eigen::MatrixXd::Constant(n, static_cast<Eigen::Index>(index.distance_columns.size()), kNaN);
    for (std::size_t d = 0; d < index.distance_columns.size(); ++d) {
      const auto& cells = frame.column(index.distance_columns[d]);
      std::vector<double> values;
      for (std::size_t r : train_rows) {
        if (auto v = perception::numeric_value(cells[r])) values.push_back(*v);
      }
      double mean = 0.0;
      for (double v : values) mean += v;
      mean = values.empty() ? 0.0 : mean / static_cast<double>(values.size());
      double sd = values.empty() ? 1.0 : population_std(values, mean);
      if (!(sd > 0.0)) sd = 1.0;
      index.means.push_back(mean);
      index.stds.push_back(sd);
      for (std::size_t i = 0; i < train_rows.size(); ++i) {
        if (auto v = perception::numeric_value(cells[train_rows[i]])) {
          index.scaled(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(d)) = (*v - mean) / sd;
        }
      }
    }
    for (const auto& c : fp.columns) {
      if (c.directive.imputation != Imputation::kKnn || !kept(c.directive)) continue;
      const auto& cells = frame.column(c.directive.column);
      std::vector<Cell> values;
      values.reserve(train_rows.size());
      for (std::size_t r : train_rows) {
        const Cell& cell = cells[r];
        // Text in a numeric column is a parse failure and reads as missing.
        if (c.numeric && !perception::is_number(cell)) {
          values.emplace_back(perception::Missing{});
        } else {
          values.push_back(cell);
        }
      }
      index.values[c.directive.column] = std::move(values);
    }
    fp.knn = std::move(index);
  }
  return fp;
}

std::vector<std::string> TransformedData::machine_ids() const {
  if (!identifiers.empty()) return identifiers.front().second;
  std::vector<std::string> out;
  out.reserve(rows.size());
  for (std::size_t r : rows) out.push_back(fmt::format("row_{}", r));
  return out;
}

TransformedData apply_pipeline(const FittedPipeline& pipeline,
                               const perception::DatasetFrame& frame,
                               std::span<const std::size_t> rows) {
  for (const auto& c : pipeline.columns) {
    if (!frame.find(c.directive.column) &&
        (kept(c.directive) || c.directive.role == Role::kIdentifier)) {
      throw Error(ErrorCode::kMissingColumn,
                  "frame lacks fitted column '" + c.directive.column + "'");
    }
  }
  TransformedData out;
  out.rows.assign(rows.begin(), rows.end());
  out.feature_names = pipeline.output_columns;
  out.features = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rows.size()),
                                       static_cast<Eigen::Index>(pipeline.output_columns.size()));
  const Imputer imputer(pipeline, frame);

  Eigen::Index offset = 0;
  for (const auto& col : pipeline.columns) {
    const auto& d = col.directive;
    if (d.role == Role::kIdentifier) {
      std::vector<std::string> ids;
      ids.reserve(rows.size());
      const auto& cells = frame.column(d.column);
      for (std::size_t r : rows) ids.push_back(perception::cell_to_string(cells[r]));
      out.identifiers.emplace_back(d.column, std::move(ids));
      continue;
    }
    if (!kept(d)) continue;
    const auto& cells = frame.column(d.column);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const auto row = static_cast<Eigen::Index>(i);
      const Cell& raw = cells[rows[i]];
      if (col.numeric) {
        const Cell value = perception::is_number(raw) ? raw : imputer.impute(col, rows[i]);
        out.features(row, offset) = (std::get<double>(value) - col.center) / col.spread;
      } else {
        const Cell value = perception::is_missing(raw) ? imputer.impute(col, rows[i]) : raw;
        const std::string cat = perception::cell_to_string(value);
        if (d.encoding == Encoding::kOneHot) {
          const auto it = std::lower_bound(col.vocabulary.begin(), col.vocabulary.end(), cat);
          if (it != col.vocabulary.end() && *it == cat) {
            out.features(row, offset + (it - col.vocabulary.begin())) = 1.0;
          }
        } else if (d.encoding == Encoding::kTargetEncoding) {
          const auto it = col.target_means.find(cat);
          out.features(row, offset) =
              it != col.target_means.end() ? it->second : col.global_target_mean;
        } else {
          out.features(row, offset) = 0.0;
        }
      }
    }
    offset += static_cast<Eigen::Index>(col.output_names.size());
  }

  if (pipeline.target_name) {
    if (const auto index = frame.find(*pipeline.target_name)) {
      std::vector<Cell> target;
      target.reserve(rows.size());
      for (std::size_t r : rows) target.push_back(frame.at(r, *index));
      out.target = std::move(target);
    }
  }
  return out;
}

nlohmann::json to_json(const PreprocessPlan& plan, const FittedPipeline* pipeline) {
  nlohmann::json out = nlohmann::json::object();
  for (const auto& d : plan.directives) {
    nlohmann::json fitted;
    if (pipeline != nullptr) {
      if (const FittedColumn* c = pipeline->find(d.column); c != nullptr && kept(d)) {
        fitted = {{"outputs", c->output_names}, {"degenerate", c->degenerate}};
        if (c->numeric) {
          fitted["median"] = c->median;
          fitted["center"] = c->center;
          fitted["spread"] = c->spread;
        } else {
          fitted["mode"] = c->mode;
        }
        if (d.encoding == Encoding::kOneHot) fitted["vocabulary"] = c->vocabulary;
        if (d.encoding == Encoding::kTargetEncoding) {
          fitted["target_means"] = c->target_means;
          fitted["global_target_mean"] = c->global_target_mean;
        }
      }
    }
    out[d.column] = {
        {"role", to_string(d.role)},
        {"imputation", to_string(d.imputation)},
        {"scaling", to_string(d.scaling)},
        {"encoding", to_string(d.encoding)},
        {"rationale", d.rationale},
        {"fitted", fitted},
    };
  }
  return out;
}

}  // namespace rxm::preprocessing
