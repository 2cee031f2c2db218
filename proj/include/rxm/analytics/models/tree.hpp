#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "rxm/core/rng.hpp"

namespace rxm::analytics {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

enum class TreeTask { kClassification, kRegression };

struct TreeParams {
  TreeTask task = TreeTask::kClassification;
  std::size_t n_classes = 0;        // classification only
  std::size_t max_depth = 0;        // 0 == unlimited
  std::size_t min_samples_split = 2;
  std::size_t max_features = 0;     // features tried per split; 0 == all
};

// CART tree: Gini impurity for classification, variance reduction for
// regression. Class labels are passed as 0..n_classes-1 stored in doubles.
class DecisionTree {
 public:
  explicit DecisionTree(TreeParams params = {}) : params_(params) {}

  // `rows` may repeat (bootstrap samples). Feature subsampling draws from
  // `rng` at every split when max_features < p.
  void fit(const Matrix& x, std::span<const double> y,
           std::span<const std::size_t> rows, Rng& rng);
  void fit(const Matrix& x, std::span<const double> y, Rng& rng);

  // Leaf class distribution (classification).
  std::vector<double> predict_proba(const Matrix& x, Eigen::Index row) const;
  // Leaf mean (regression) or argmax class (classification).
  double predict(const Matrix& x, Eigen::Index row) const;
  std::vector<double> predict(const Matrix& x) const;

  // Weighted impurity decrease per feature, not normalized.
  const std::vector<double>& impurity_decrease() const { return importance_; }

  std::size_t node_count() const { return nodes_.size(); }
  std::size_t depth() const { return depth_; }
  const TreeParams& params() const { return params_; }

 private:
  struct Node {
    std::int32_t feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    std::int32_t left = -1;
    std::int32_t right = -1;
    std::vector<double> value;  // class distribution, or {mean}
  };

  std::int32_t build(const Matrix& x, std::span<const double> y,
                     std::vector<std::size_t>& rows, std::size_t begin,
                     std::size_t end, std::size_t depth, Rng& rng);
  const Node& leaf_for(const Matrix& x, Eigen::Index row) const;

  TreeParams params_;
  std::vector<Node> nodes_;
  std::vector<double> importance_;
  std::size_t total_samples_ = 0;
  std::size_t depth_ = 0;
};

struct ForestParams {
  TreeTask task = TreeTask::kClassification;
  std::size_t n_classes = 0;
  std::size_t n_estimators = 100;
  std::size_t max_depth = 0;
  std::size_t min_samples_split = 2;
  // 0 selects the default: sqrt(p) for classification, p/3 for regression.
  std::size_t max_features = 0;
  bool bootstrap = true;
  // Fraction of rows drawn per tree (with replacement when bootstrapping).
  double sample_fraction = 1.0;
  std::uint64_t seed = 42;
};

// Tree i is grown from its own Rng seeded with seed + i, so results do not
// depend on evaluation order.
class RandomForest {
 public:
  explicit RandomForest(ForestParams params = {}) : params_(params) {}

  void fit(const Matrix& x, std::span<const double> y);

  std::vector<double> predict_proba(const Matrix& x, Eigen::Index row) const;
  std::vector<double> predict(const Matrix& x) const;

  // Mean impurity decrease per feature, normalized to sum to 1 (all zeros
  // when no split was made).
  std::vector<double> feature_importances() const;

  const std::vector<DecisionTree>& trees() const { return trees_; }
  const ForestParams& params() const { return params_; }
  std::size_t resolved_max_features(std::size_t n_features) const;

 private:
  ForestParams params_;
  std::vector<DecisionTree> trees_;
  std::size_t n_features_ = 0;
};

}  // namespace rxm::analytics
