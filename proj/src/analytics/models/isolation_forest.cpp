#include "rxm/analytics/models/isolation_forest.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "rxm/core/error.hpp"

namespace rxm::analytics {

namespace {

constexpr double kEulerGamma = 0.5772156649015329;

double harmonic(std::size_t i) {
  if (i <= 4096) {
    double sum = 0.0;
    for (std::size_t k = i; k >= 1; --k) sum += 1.0 / static_cast<double>(k);
    return sum;
  }
  const double d = static_cast<double>(i);
  return std::log(d) + kEulerGamma + 1.0 / (2.0 * d) - 1.0 / (12.0 * d * d);
}

}  // namespace

double average_path_length(std::size_t n) {
  if (n <= 1) return 0.0;
  const double nd = static_cast<double>(n);
  return 2.0 * harmonic(n - 1) - 2.0 * (nd - 1.0) / nd;
}

void IsolationForest::fit(const Matrix& x) {
  if (x.rows() == 0) {
    throw Error(ErrorCode::kEmptyTrainSet, "isolation forest needs rows");
  }
  if (params_.n_estimators == 0) {
    throw Error(ErrorCode::kInvalidArgument, "n_estimators must be positive");
  }
  if (params_.contamination &&
      (*params_.contamination < 0.0 || *params_.contamination > 0.5)) {
    throw Error(ErrorCode::kInvalidArgument, "contamination must be in [0, 0.5]");
  }
  const auto n = static_cast<std::size_t>(x.rows());
  psi_ = std::min(params_.max_samples, n);
  const auto limit = static_cast<std::size_t>(
      std::ceil(std::log2(static_cast<double>(std::max<std::size_t>(psi_, 2)))));

  trees_.clear();
  trees_.reserve(params_.n_estimators);
  std::vector<Eigen::Index> all(n);
  std::iota(all.begin(), all.end(), Eigen::Index{0});
  for (std::size_t t = 0; t < params_.n_estimators; ++t) {
    Rng rng(params_.seed + t);
    // Partial Fisher-Yates draws psi rows without replacement.
    std::vector<Eigen::Index> pool = all;
    for (std::size_t i = 0; i < psi_; ++i) {
      std::swap(pool[i], pool[i + rng.index(n - i)]);
    }
    pool.resize(psi_);
    Tree tree;
    grow(tree, x, pool, 0, pool.size(), 0, limit, rng);
    trees_.push_back(std::move(tree));
  }
}

std::int32_t IsolationForest::grow(Tree& tree, const Matrix& x,
                                   std::vector<Eigen::Index>& rows,
                                   std::size_t begin, std::size_t end,
                                   std::size_t depth, std::size_t limit,
                                   Rng& rng) const {
  const auto index = static_cast<std::int32_t>(tree.size());
  tree.push_back(Node{-1, 0.0, -1, -1, end - begin});
  if (end - begin <= 1 || depth >= limit) return index;

  // Choose among features that still vary inside this node.
  std::vector<std::pair<Eigen::Index, std::pair<double, double>>> varying;
  for (Eigen::Index f = 0; f < x.cols(); ++f) {
    double lo = INFINITY;
    double hi = -INFINITY;
    for (std::size_t i = begin; i < end; ++i) {
      lo = std::min(lo, x(rows[i], f));
      hi = std::max(hi, x(rows[i], f));
    }
    if (hi > lo) varying.push_back({f, {lo, hi}});
  }
  if (varying.empty()) return index;

  const auto& [feature, range] = varying[rng.index(varying.size())];
  double split = rng.uniform(range.first, range.second);
  if (split <= range.first) split = std::nextafter(range.first, range.second);

  const auto mid_it = std::partition(
      rows.begin() + static_cast<long>(begin), rows.begin() + static_cast<long>(end),
      [&](Eigen::Index r) { return x(r, feature) < split; });
  const auto mid = static_cast<std::size_t>(mid_it - rows.begin());

  const std::int32_t left = grow(tree, x, rows, begin, mid, depth + 1, limit, rng);
  const std::int32_t right = grow(tree, x, rows, mid, end, depth + 1, limit, rng);
  Node& node = tree[static_cast<std::size_t>(index)];
  node.feature = static_cast<std::int32_t>(feature);
  node.split = split;
  node.left = left;
  node.right = right;
  return index;
}

double IsolationForest::path_length(std::size_t tree, const Matrix& x,
                                    Eigen::Index row) const {
  const Tree& t = trees_.at(tree);
  std::size_t at = 0;
  double depth = 0.0;
  while (t[at].feature >= 0) {
    const Node& n = t[at];
    at = static_cast<std::size_t>(x(row, n.feature) < n.split ? n.left : n.right);
    depth += 1.0;
  }
  return depth + average_path_length(t[at].size);
}

std::vector<double> IsolationForest::score(const Matrix& x) const {
  if (trees_.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "isolation forest is not fitted");
  }
  const double norm = std::max(average_path_length(psi_), 1e-12);
  std::vector<double> out(static_cast<std::size_t>(x.rows()));
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    double total = 0.0;
    for (std::size_t t = 0; t < trees_.size(); ++t) total += path_length(t, x, r);
    const double mean = total / static_cast<double>(trees_.size());
    out[static_cast<std::size_t>(r)] = std::pow(2.0, -mean / norm);
  }
  return out;
}

std::vector<bool> IsolationForest::flag(const std::vector<double>& scores) const {
  std::vector<bool> flags(scores.size(), false);
  if (!params_.contamination) {
    for (std::size_t i = 0; i < scores.size(); ++i) {
      flags[i] = scores[i] > params_.auto_threshold;
    }
    return flags;
  }
  const auto k = static_cast<std::size_t>(
      std::llround(*params_.contamination * static_cast<double>(scores.size())));
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return scores[a] > scores[b];
  });
  for (std::size_t i = 0; i < std::min(k, order.size()); ++i) flags[order[i]] = true;
  return flags;
}

}  // namespace rxm::analytics
