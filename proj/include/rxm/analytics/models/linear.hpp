#pragma once

#include <cstddef>
#include <vector>

#include "rxm/analytics/models/tree.hpp"

namespace rxm::analytics {

// Fitted affine model y = x·coef + intercept. The intercept is never
// penalized; all three solvers work on column-centered data.
struct LinearFit {
  Vector coefficients;
  double intercept = 0.0;
  std::size_t iterations = 0;

  std::vector<double> predict(const Matrix& x) const;
};

// Ordinary least squares (column-pivoting QR).
LinearFit fit_linear_regression(const Matrix& x, const Vector& y);

// Minimizes ||y - Xw - b||^2 + alpha ||w||^2.
LinearFit fit_ridge(const Matrix& x, const Vector& y, double alpha = 1.0);

// Cyclic coordinate descent on (1/2n) ||y - Xw - b||^2 + alpha ||w||_1.
// Stops when the largest coefficient change of a sweep is below tol.
LinearFit fit_lasso(const Matrix& x, const Vector& y, double alpha = 1.0,
                    double tol = 1e-7, std::size_t max_sweeps = 10000);

struct LogisticParams {
  double l2 = 1.0;  // penalty (l2 / 2n) ||W||^2 on the mean cross-entropy
  double tol = 1e-6;
  std::size_t max_iter = 1000;
};

// Multinomial softmax regression fitted by full-batch gradient descent with
// Armijo backtracking.
class LogisticRegression {
 public:
  explicit LogisticRegression(LogisticParams params = {}) : params_(params) {}

  // Labels in 0..n_classes-1.
  void fit(const Matrix& x, const std::vector<double>& y, std::size_t n_classes);

  std::vector<double> predict_proba(const Matrix& x, Eigen::Index row) const;
  std::vector<double> predict(const Matrix& x) const;

  const Matrix& weights() const { return weights_; }  // p x k
  const Vector& bias() const { return bias_; }
  // Objective value before the first step and after every accepted step.
  const std::vector<double>& loss_history() const { return loss_history_; }
  std::size_t iterations() const { return iterations_; }

 private:
  double objective(const Matrix& x, const std::vector<double>& y,
                   const Matrix& w, const Vector& b, Matrix* grad_w,
                   Vector* grad_b) const;

  LogisticParams params_;
  Matrix weights_;
  Vector bias_;
  std::vector<double> loss_history_;
  std::size_t iterations_ = 0;
};

}  // namespace rxm::analytics
