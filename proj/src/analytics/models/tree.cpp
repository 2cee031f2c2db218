#include "rxm/analytics/models/tree.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "rxm/core/error.hpp"

namespace rxm::analytics {

namespace {

struct SplitCandidate {
  bool found = false;
  std::size_t feature = 0;
  double threshold = 0.0;
  double child_impurity = 0.0;  // weighted by child share
};

double gini(std::span<const double> counts, double total) {
  if (total <= 0.0) return 0.0;
  double sum_sq = 0.0;
  for (double c : counts) sum_sq += (c / total) * (c / total);
  return 1.0 - sum_sq;
}

double variance(double sum, double sum_sq, double n) {
  if (n <= 0.0) return 0.0;
  const double mean = sum / n;
  return std::max(0.0, sum_sq / n - mean * mean);
}

}  // namespace

void DecisionTree::fit(const Matrix& x, std::span<const double> y, Rng& rng) {
  std::vector<std::size_t> rows(static_cast<std::size_t>(x.rows()));
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  fit(x, y, rows, rng);
}

void DecisionTree::fit(const Matrix& x, std::span<const double> y,
                       std::span<const std::size_t> rows, Rng& rng) {
  if (rows.empty()) {
    throw Error(ErrorCode::kEmptyTrainSet, "decision tree needs training rows");
  }
  if (static_cast<std::size_t>(x.rows()) != y.size()) {
    throw Error(ErrorCode::kInvalidArgument, "feature/target length mismatch");
  }
  if (params_.task == TreeTask::kClassification && params_.n_classes == 0) {
    throw Error(ErrorCode::kInvalidArgument, "classification tree needs n_classes");
  }
  nodes_.clear();
  depth_ = 0;
  importance_.assign(static_cast<std::size_t>(x.cols()), 0.0);
  total_samples_ = rows.size();
  std::vector<std::size_t> work(rows.begin(), rows.end());
  build(x, y, work, 0, work.size(), 0, rng);
}

std::int32_t DecisionTree::build(const Matrix& x, std::span<const double> y,
                                 std::vector<std::size_t>& rows,
                                 std::size_t begin, std::size_t end,
                                 std::size_t depth, Rng& rng) {
  const std::size_t n = end - begin;
  const double nd = static_cast<double>(n);
  const bool classify = params_.task == TreeTask::kClassification;
  const std::size_t k = params_.n_classes;
  depth_ = std::max(depth_, depth);

  Node node;
  double impurity = 0.0;
  if (classify) {
    node.value.assign(k, 0.0);
    for (std::size_t i = begin; i < end; ++i) {
      node.value[static_cast<std::size_t>(y[rows[i]])] += 1.0;
    }
    impurity = gini(node.value, nd);
    for (double& v : node.value) v /= nd;
  } else {
    double sum = 0.0;
    double sum_sq = 0.0;
    for (std::size_t i = begin; i < end; ++i) {
      sum += y[rows[i]];
      sum_sq += y[rows[i]] * y[rows[i]];
    }
    node.value = {sum / nd};
    impurity = variance(sum, sum_sq, nd);
  }

  const auto index = static_cast<std::int32_t>(nodes_.size());
  nodes_.push_back(std::move(node));

  const bool depth_capped = params_.max_depth > 0 && depth >= params_.max_depth;
  if (n < params_.min_samples_split || depth_capped || impurity <= 0.0) {
    return index;
  }

  const std::size_t p = static_cast<std::size_t>(x.cols());
  std::vector<std::size_t> features(p);
  std::iota(features.begin(), features.end(), std::size_t{0});
  std::size_t n_try = p;
  if (params_.max_features > 0 && params_.max_features < p) {
    n_try = params_.max_features;
    for (std::size_t i = 0; i < n_try; ++i) {
      std::swap(features[i], features[i + rng.index(p - i)]);
    }
    std::sort(features.begin(), features.begin() + static_cast<long>(n_try));
  }

  SplitCandidate best;
  std::vector<std::pair<double, std::size_t>> sorted(n);
  std::vector<double> left_counts(k);
  std::vector<double> right_counts(k);
  for (std::size_t t = 0; t < n_try; ++t) {
    const std::size_t f = features[t];
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t r = rows[begin + i];
      sorted[i] = {x(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(f)), r};
    }
    std::sort(sorted.begin(), sorted.end());
    if (sorted.front().first == sorted.back().first) continue;

    double left_sum = 0.0, left_sq = 0.0, total_sum = 0.0, total_sq = 0.0;
    if (classify) {
      std::fill(left_counts.begin(), left_counts.end(), 0.0);
      std::fill(right_counts.begin(), right_counts.end(), 0.0);
      for (const auto& [v, r] : sorted) {
        right_counts[static_cast<std::size_t>(y[r])] += 1.0;
      }
    } else {
      for (const auto& [v, r] : sorted) {
        total_sum += y[r];
        total_sq += y[r] * y[r];
      }
    }

    for (std::size_t i = 0; i + 1 < n; ++i) {
      const double label = y[sorted[i].second];
      if (classify) {
        left_counts[static_cast<std::size_t>(label)] += 1.0;
        right_counts[static_cast<std::size_t>(label)] -= 1.0;
      } else {
        left_sum += label;
        left_sq += label * label;
      }
      if (sorted[i].first == sorted[i + 1].first) continue;
      const double nl = static_cast<double>(i + 1);
      const double nr = nd - nl;
      double child = 0.0;
      if (classify) {
        child = (nl * gini(left_counts, nl) + nr * gini(right_counts, nr)) / nd;
      } else {
        child = (nl * variance(left_sum, left_sq, nl) +
                 nr * variance(total_sum - left_sum, total_sq - left_sq, nr)) /
                nd;
      }
      if (!best.found || child < best.child_impurity) {
        double threshold = 0.5 * (sorted[i].first + sorted[i + 1].first);
        if (threshold >= sorted[i + 1].first) threshold = sorted[i].first;
        best = {true, f, threshold, child};
      }
    }
  }
  if (!best.found) return index;

  const auto mid_it = std::partition(
      rows.begin() + static_cast<long>(begin), rows.begin() + static_cast<long>(end),
      [&](std::size_t r) {
        return x(static_cast<Eigen::Index>(r),
                 static_cast<Eigen::Index>(best.feature)) <= best.threshold;
      });
  const auto mid = static_cast<std::size_t>(mid_it - rows.begin());

  importance_[best.feature] += nd / static_cast<double>(total_samples_) *
                               std::max(0.0, impurity - best.child_impurity);

  const std::int32_t left = build(x, y, rows, begin, mid, depth + 1, rng);
  const std::int32_t right = build(x, y, rows, mid, end, depth + 1, rng);
  Node& self = nodes_[static_cast<std::size_t>(index)];
  self.feature = static_cast<std::int32_t>(best.feature);
  self.threshold = best.threshold;
  self.left = left;
  self.right = right;
  return index;
}

const DecisionTree::Node& DecisionTree::leaf_for(const Matrix& x,
                                                 Eigen::Index row) const {
  if (nodes_.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "decision tree is not fitted");
  }
  std::size_t at = 0;
  while (nodes_[at].feature >= 0) {
    const Node& n = nodes_[at];
    at = static_cast<std::size_t>(x(row, n.feature) <= n.threshold ? n.left : n.right);
  }
  return nodes_[at];
}

std::vector<double> DecisionTree::predict_proba(const Matrix& x,
                                                Eigen::Index row) const {
  return leaf_for(x, row).value;
}

double DecisionTree::predict(const Matrix& x, Eigen::Index row) const {
  const Node& leaf = leaf_for(x, row);
  if (params_.task == TreeTask::kRegression) return leaf.value.front();
  const auto best = std::max_element(leaf.value.begin(), leaf.value.end());
  return static_cast<double>(best - leaf.value.begin());
}

std::vector<double> DecisionTree::predict(const Matrix& x) const {
  std::vector<double> out(static_cast<std::size_t>(x.rows()));
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    out[static_cast<std::size_t>(r)] = predict(x, r);
  }
  return out;
}

std::size_t RandomForest::resolved_max_features(std::size_t n_features) const {
  if (params_.max_features > 0) return std::min(params_.max_features, n_features);
  if (params_.task == TreeTask::kClassification) {
    return std::max<std::size_t>(
        1, static_cast<std::size_t>(std::sqrt(static_cast<double>(n_features))));
  }
  return std::max<std::size_t>(1, n_features / 3);
}

void RandomForest::fit(const Matrix& x, std::span<const double> y) {
  if (x.rows() == 0) {
    throw Error(ErrorCode::kEmptyTrainSet, "random forest needs training rows");
  }
  if (params_.n_estimators == 0) {
    throw Error(ErrorCode::kInvalidArgument, "n_estimators must be positive");
  }
  n_features_ = static_cast<std::size_t>(x.cols());
  TreeParams tree_params;
  tree_params.task = params_.task;
  tree_params.n_classes = params_.n_classes;
  tree_params.max_depth = params_.max_depth;
  tree_params.min_samples_split = params_.min_samples_split;
  tree_params.max_features = resolved_max_features(n_features_);

  const auto n = static_cast<std::size_t>(x.rows());
  const auto draw = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::llround(params_.sample_fraction *
                                               static_cast<double>(n))));
  trees_.clear();
  trees_.reserve(params_.n_estimators);
  for (std::size_t t = 0; t < params_.n_estimators; ++t) {
    Rng rng(params_.seed + t);
    std::vector<std::size_t> rows;
    if (params_.bootstrap) {
      rows.resize(draw);
      for (auto& r : rows) r = rng.index(n);
    } else {
      rows.resize(n);
      std::iota(rows.begin(), rows.end(), std::size_t{0});
      if (draw < n) {
        rng.shuffle(std::span<std::size_t>(rows));
        rows.resize(draw);
        std::sort(rows.begin(), rows.end());
      }
    }
    DecisionTree tree(tree_params);
    tree.fit(x, y, rows, rng);
    trees_.push_back(std::move(tree));
  }
}

std::vector<double> RandomForest::predict_proba(const Matrix& x,
                                                Eigen::Index row) const {
  std::vector<double> sum(params_.n_classes, 0.0);
  for (const auto& tree : trees_) {
    const auto p = tree.predict_proba(x, row);
    for (std::size_t c = 0; c < sum.size(); ++c) sum[c] += p[c];
  }
  for (auto& v : sum) v /= static_cast<double>(trees_.size());
  return sum;
}

std::vector<double> RandomForest::predict(const Matrix& x) const {
  std::vector<double> out(static_cast<std::size_t>(x.rows()));
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    if (params_.task == TreeTask::kClassification) {
      const auto p = predict_proba(x, r);
      out[static_cast<std::size_t>(r)] =
          static_cast<double>(std::max_element(p.begin(), p.end()) - p.begin());
    } else {
      double sum = 0.0;
      for (const auto& tree : trees_) sum += tree.predict(x, r);
      out[static_cast<std::size_t>(r)] = sum / static_cast<double>(trees_.size());
    }
  }
  return out;
}

std::vector<double> RandomForest::feature_importances() const {
  std::vector<double> total(n_features_, 0.0);
  for (const auto& tree : trees_) {
    const auto& imp = tree.impurity_decrease();
    double tree_sum = std::accumulate(imp.begin(), imp.end(), 0.0);
    if (tree_sum <= 0.0) continue;
    for (std::size_t f = 0; f < n_features_; ++f) total[f] += imp[f] / tree_sum;
  }
  const double sum = std::accumulate(total.begin(), total.end(), 0.0);
  if (sum > 0.0) {
    for (auto& v : total) v /= sum;
  }
  return total;
}

}  // namespace rxm::analytics
