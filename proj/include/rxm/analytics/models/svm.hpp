#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "rxm/analytics/models/tree.hpp"

namespace rxm::analytics {

struct SvmParams {
  double c = 1.0;
  double tol = 1e-3;
  std::size_t max_passes = 200;
  double epsilon = 0.1;  // SVR tube half-width
  std::uint64_t seed = 42;
};

// gamma = 1 / (p * Var(X)) over all entries of X; 1 / p when X is constant.
double rbf_scale_gamma(const Matrix& x);

// RBF support vector classifier. Each class pair is solved by simplified SMO
// and predictions are one-vs-one votes (ties go to the lower class index).
class SvmClassifier {
 public:
  explicit SvmClassifier(SvmParams params = {}) : params_(params) {}

  void fit(const Matrix& x, const std::vector<double>& y, std::size_t n_classes);
  std::vector<double> predict(const Matrix& x) const;
  double gamma() const { return gamma_; }

 private:
  struct Binary {
    std::size_t positive = 0;
    std::size_t negative = 0;
    std::vector<Eigen::Index> support;  // rows of the training matrix
    std::vector<double> coef;           // alpha_i * y_i
    double bias = 0.0;
  };

  double decision(const Binary& m, const Matrix& x, Eigen::Index row) const;

  SvmParams params_;
  Matrix train_;
  double gamma_ = 1.0;
  std::size_t n_classes_ = 0;
  std::vector<Binary> machines_;
};

// RBF epsilon-SVR. The bias is folded into the kernel (K + 1) so the dual
// has only box constraints and is solved one coordinate at a time.
class SvmRegressor {
 public:
  explicit SvmRegressor(SvmParams params = {}) : params_(params) {}

  void fit(const Matrix& x, const Vector& y);
  std::vector<double> predict(const Matrix& x) const;
  std::size_t passes() const { return passes_; }

 private:
  SvmParams params_;
  Matrix train_;
  std::vector<double> beta_;
  double gamma_ = 1.0;
  std::size_t passes_ = 0;
};

}  // namespace rxm::analytics
