#include "rxm/analytics/models/linear.hpp"

#include <algorithm>
#include <cmath>

#include "rxm/core/error.hpp"

namespace rxm::analytics {

namespace {

struct Centered {
  Matrix x;
  Vector y;
  Eigen::RowVectorXd x_mean;
  double y_mean = 0.0;
};

Centered center(const Matrix& x, const Vector& y) {
  if (x.rows() == 0 || x.rows() != y.size()) {
    throw Error(ErrorCode::kInvalidArgument,
                "linear model needs matching, non-empty X and y");
  }
  Centered c;
  c.x_mean = x.colwise().mean();
  c.y_mean = y.mean();
  c.x = x.rowwise() - c.x_mean;
  c.y = y.array() - c.y_mean;
  return c;
}

LinearFit finish(const Centered& c, Vector coefficients, std::size_t iterations) {
  LinearFit fit;
  fit.intercept = c.y_mean - c.x_mean.dot(coefficients);
  fit.coefficients = std::move(coefficients);
  fit.iterations = iterations;
  return fit;
}

double soft_threshold(double value, double lambda) {
  if (value > lambda) return value - lambda;
  if (value < -lambda) return value + lambda;
  return 0.0;
}

}  // namespace

std::vector<double> LinearFit::predict(const Matrix& x) const {
  const Vector out = (x * coefficients).array() + intercept;
  return {out.data(), out.data() + out.size()};
}

LinearFit fit_linear_regression(const Matrix& x, const Vector& y) {
  const Centered c = center(x, y);
  Vector w = c.x.colPivHouseholderQr().solve(c.y);
  return finish(c, std::move(w), 1);
}

LinearFit fit_ridge(const Matrix& x, const Vector& y, double alpha) {
  if (alpha < 0.0) throw Error(ErrorCode::kInvalidArgument, "alpha must be >= 0");
  const Centered c = center(x, y);
  Matrix gram = c.x.transpose() * c.x;
  gram.diagonal().array() += alpha;
  Vector w = gram.ldlt().solve(c.x.transpose() * c.y);
  return finish(c, std::move(w), 1);
}

LinearFit fit_lasso(const Matrix& x, const Vector& y, double alpha, double tol,
                    std::size_t max_sweeps) {
  if (alpha < 0.0) throw Error(ErrorCode::kInvalidArgument, "alpha must be >= 0");
  const Centered c = center(x, y);
  const auto n = static_cast<double>(c.x.rows());
  const Eigen::Index p = c.x.cols();
  const Vector col_sq = c.x.colwise().squaredNorm().transpose() / n;

  Vector w = Vector::Zero(p);
  Vector residual = c.y;
  std::size_t sweep = 0;
  for (; sweep < max_sweeps; ++sweep) {
    double max_change = 0.0;
    for (Eigen::Index j = 0; j < p; ++j) {
      if (col_sq(j) <= 0.0) continue;
      const double old = w(j);
      const double rho = c.x.col(j).dot(residual) / n + col_sq(j) * old;
      const double updated = soft_threshold(rho, alpha) / col_sq(j);
      if (updated != old) {
        residual -= (updated - old) * c.x.col(j);
        w(j) = updated;
        max_change = std::max(max_change, std::abs(updated - old));
      }
    }
    if (max_change < tol) {
      ++sweep;
      break;
    }
  }
  return finish(c, std::move(w), sweep);
}

double LogisticRegression::objective(const Matrix& x,
                                     const std::vector<double>& y,
                                     const Matrix& w, const Vector& b,
                                     Matrix* grad_w, Vector* grad_b) const {
  const Eigen::Index n = x.rows();
  const auto nd = static_cast<double>(n);
  Matrix logits = x * w;
  logits.rowwise() += b.transpose();
  double loss = 0.0;
  Matrix delta(n, w.cols());
  for (Eigen::Index i = 0; i < n; ++i) {
    const double top = logits.row(i).maxCoeff();
    const Eigen::RowVectorXd e = (logits.row(i).array() - top).exp();
    const double z = e.sum();
    const auto label = static_cast<Eigen::Index>(y[static_cast<std::size_t>(i)]);
    loss -= logits(i, label) - top - std::log(z);
    delta.row(i) = e / z;
    delta(i, label) -= 1.0;
  }
  loss = loss / nd + params_.l2 / (2.0 * nd) * w.squaredNorm();
  if (grad_w != nullptr) {
    *grad_w = x.transpose() * delta / nd + params_.l2 / nd * w;
    *grad_b = delta.colwise().sum().transpose() / nd;
  }
  return loss;
}

void LogisticRegression::fit(const Matrix& x, const std::vector<double>& y,
                             std::size_t n_classes) {
  if (x.rows() == 0 || static_cast<std::size_t>(x.rows()) != y.size()) {
    throw Error(ErrorCode::kInvalidArgument,
                "logistic regression needs matching, non-empty X and y");
  }
  if (n_classes < 2) {
    throw Error(ErrorCode::kInvalidArgument, "logistic regression needs >= 2 classes");
  }
  const auto k = static_cast<Eigen::Index>(n_classes);
  weights_ = Matrix::Zero(x.cols(), k);
  bias_ = Vector::Zero(k);
  loss_history_.clear();

  Matrix grad_w;
  Vector grad_b;
  double loss = objective(x, y, weights_, bias_, &grad_w, &grad_b);
  loss_history_.push_back(loss);
  double step = 1.0;
  iterations_ = 0;
  while (iterations_ < params_.max_iter) {
    const double grad_inf =
        std::max(grad_w.cwiseAbs().maxCoeff(), grad_b.cwiseAbs().maxCoeff());
    if (grad_inf < params_.tol) break;
    const double grad_sq = grad_w.squaredNorm() + grad_b.squaredNorm();
    ++iterations_;

    bool accepted = false;
    for (int shrink = 0; shrink < 60; ++shrink) {
      const Matrix w_try = weights_ - step * grad_w;
      const Vector b_try = bias_ - step * grad_b;
      const double trial = objective(x, y, w_try, b_try, nullptr, nullptr);
      if (trial <= loss - 0.5 * step * grad_sq) {
        weights_ = w_try;
        bias_ = b_try;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;
    const double previous = loss;
    loss = objective(x, y, weights_, bias_, &grad_w, &grad_b);
    loss_history_.push_back(loss);
    step *= 2.0;
    if (previous - loss < params_.tol * 1e-6) break;
  }
}

std::vector<double> LogisticRegression::predict_proba(const Matrix& x,
                                                      Eigen::Index row) const {
  Eigen::RowVectorXd logits = x.row(row) * weights_ + bias_.transpose();
  logits.array() -= logits.maxCoeff();
  const Eigen::RowVectorXd e = logits.array().exp();
  const double z = e.sum();
  std::vector<double> out(static_cast<std::size_t>(e.size()));
  for (Eigen::Index c = 0; c < e.size(); ++c) out[static_cast<std::size_t>(c)] = e(c) / z;
  return out;
}

std::vector<double> LogisticRegression::predict(const Matrix& x) const {
  std::vector<double> out(static_cast<std::size_t>(x.rows()));
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    const auto p = predict_proba(x, r);
    out[static_cast<std::size_t>(r)] =
        static_cast<double>(std::max_element(p.begin(), p.end()) - p.begin());
  }
  return out;
}

}  // namespace rxm::analytics
