#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "rxm/analytics/models/tree.hpp"

namespace rxm::analytics {

// Expected path length of an unsuccessful search in a binary search tree of
// n points: c(n) = 2 H(n-1) - 2 (n-1) / n, with c(0) = c(1) = 0.
double average_path_length(std::size_t n);

struct IsolationForestParams {
  std::size_t n_estimators = 200;
  std::size_t max_samples = 256;  // subsample size is min(max_samples, n)
  // Explicit fraction of rows to flag; nullopt means "auto".
  std::optional<double> contamination;
  // Score cutoff used when contamination is auto.
  double auto_threshold = 0.6;
  std::uint64_t seed = 42;
};

class IsolationForest {
 public:
  explicit IsolationForest(IsolationForestParams params = {}) : params_(params) {}

  void fit(const Matrix& x);

  // Path length of one row in one tree, including the c(size) adjustment at
  // the external node.
  double path_length(std::size_t tree, const Matrix& x, Eigen::Index row) const;

  // s(x) = 2^(-E[h(x)] / c(psi)) for every row of x.
  std::vector<double> score(const Matrix& x) const;

  // Explicit contamination q flags exactly round(q * n) rows with the
  // highest scores (ties go to the lower row index); auto flags s > cutoff.
  std::vector<bool> flag(const std::vector<double>& scores) const;

  std::size_t subsample_size() const { return psi_; }
  std::size_t tree_count() const { return trees_.size(); }
  const IsolationForestParams& params() const { return params_; }

 private:
  struct Node {
    std::int32_t feature = -1;  // -1 marks an external node
    double split = 0.0;
    std::int32_t left = -1;
    std::int32_t right = -1;
    std::size_t size = 0;
  };
  using Tree = std::vector<Node>;

  std::int32_t grow(Tree& tree, const Matrix& x, std::vector<Eigen::Index>& rows,
                    std::size_t begin, std::size_t end, std::size_t depth,
                    std::size_t limit, Rng& rng) const;

  IsolationForestParams params_;
  std::vector<Tree> trees_;
  std::size_t psi_ = 0;
};

}  // namespace rxm::analytics
