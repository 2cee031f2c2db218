#include "rxm/analytics/models/svm.hpp"

#include <algorithm>
#include <cmath>

#include "rxm/core/error.hpp"
#include "rxm/core/rng.hpp"

namespace rxm::analytics {

namespace {

// A pass over all rows with no update counts toward convergence; this many
// in a row end the solve early.
constexpr std::size_t kQuietPasses = 3;

double rbf(const Matrix& a, Eigen::Index i, const Matrix& b, Eigen::Index j,
           double gamma) {
  return std::exp(-gamma * (a.row(i) - b.row(j)).squaredNorm());
}

Matrix kernel_matrix(const Matrix& x, double gamma) {
  const Eigen::Index n = x.rows();
  Matrix k(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    k(i, i) = 1.0;
    for (Eigen::Index j = i + 1; j < n; ++j) {
      k(i, j) = k(j, i) = rbf(x, i, x, j, gamma);
    }
  }
  return k;
}

}  // namespace

double rbf_scale_gamma(const Matrix& x) {
  const double p = static_cast<double>(std::max<Eigen::Index>(1, x.cols()));
  if (x.size() == 0) return 1.0 / p;
  const double mean = x.mean();
  const double var = (x.array() - mean).square().mean();
  return var > 0.0 ? 1.0 / (p * var) : 1.0 / p;
}

void SvmClassifier::fit(const Matrix& x, const std::vector<double>& y,
                        std::size_t n_classes) {
  if (x.rows() == 0 || static_cast<std::size_t>(x.rows()) != y.size()) {
    throw Error(ErrorCode::kInvalidArgument, "SVC needs matching, non-empty X and y");
  }
  if (n_classes < 2) throw Error(ErrorCode::kInvalidArgument, "SVC needs >= 2 classes");
  train_ = x;
  gamma_ = rbf_scale_gamma(x);
  n_classes_ = n_classes;
  machines_.clear();
  const Matrix full_kernel = kernel_matrix(x, gamma_);
  Rng rng(params_.seed);

  for (std::size_t a = 0; a < n_classes; ++a) {
    for (std::size_t b = a + 1; b < n_classes; ++b) {
      std::vector<Eigen::Index> rows;
      std::vector<double> labels;
      for (std::size_t r = 0; r < y.size(); ++r) {
        if (y[r] == static_cast<double>(a) || y[r] == static_cast<double>(b)) {
          rows.push_back(static_cast<Eigen::Index>(r));
          labels.push_back(y[r] == static_cast<double>(a) ? 1.0 : -1.0);
        }
      }
      Binary machine{a, b, {}, {}, 0.0};
      const std::size_t n = rows.size();
      if (n == 0) {
        machines_.push_back(machine);
        continue;
      }
      auto kij = [&](std::size_t i, std::size_t j) {
        return full_kernel(rows[i], rows[j]);
      };
      std::vector<double> alpha(n, 0.0);
      std::vector<double> f(n, 0.0);  // decision value minus bias
      double bias = 0.0;
      const double c = params_.c;
      std::size_t quiet = 0;
      for (std::size_t pass = 0; pass < params_.max_passes && quiet < kQuietPasses;
           ++pass) {
        std::size_t changed = 0;
        for (std::size_t i = 0; i < n && n > 1; ++i) {
          const double ei = f[i] + bias - labels[i];
          const double yi = labels[i];
          if (!((yi * ei < -params_.tol && alpha[i] < c) ||
                (yi * ei > params_.tol && alpha[i] > 0.0))) {
            continue;
          }
          std::size_t j = rng.index(n - 1);
          if (j >= i) ++j;
          const double yj = labels[j];
          const double ej = f[j] + bias - yj;
          const double ai_old = alpha[i];
          const double aj_old = alpha[j];
          const double lo = yi != yj ? std::max(0.0, aj_old - ai_old)
                                     : std::max(0.0, ai_old + aj_old - c);
          const double hi = yi != yj ? std::min(c, c + aj_old - ai_old)
                                     : std::min(c, ai_old + aj_old);
          if (lo >= hi) continue;
          const double eta = 2.0 * kij(i, j) - kij(i, i) - kij(j, j);
          if (eta >= 0.0) continue;
          double aj = std::clamp(aj_old - yj * (ei - ej) / eta, lo, hi);
          if (std::abs(aj - aj_old) < 1e-5) continue;
          const double ai = ai_old + yi * yj * (aj_old - aj);
          const double b1 = bias - ei - yi * (ai - ai_old) * kij(i, i) -
                            yj * (aj - aj_old) * kij(i, j);
          const double b2 = bias - ej - yi * (ai - ai_old) * kij(i, j) -
                            yj * (aj - aj_old) * kij(j, j);
          if (ai > 0.0 && ai < c) {
            bias = b1;
          } else if (aj > 0.0 && aj < c) {
            bias = b2;
          } else {
            bias = 0.5 * (b1 + b2);
          }
          const double di = yi * (ai - ai_old);
          const double dj = yj * (aj - aj_old);
          for (std::size_t k = 0; k < n; ++k) f[k] += di * kij(i, k) + dj * kij(j, k);
          alpha[i] = ai;
          alpha[j] = aj;
          ++changed;
        }
        quiet = changed == 0 ? quiet + 1 : 0;
      }
      for (std::size_t i = 0; i < n; ++i) {
        if (alpha[i] > 0.0) {
          machine.support.push_back(rows[i]);
          machine.coef.push_back(alpha[i] * labels[i]);
        }
      }
      machine.bias = bias;
      machines_.push_back(std::move(machine));
    }
  }
}

double SvmClassifier::decision(const Binary& m, const Matrix& x,
                               Eigen::Index row) const {
  double sum = m.bias;
  for (std::size_t s = 0; s < m.support.size(); ++s) {
    sum += m.coef[s] * rbf(train_, m.support[s], x, row, gamma_);
  }
  return sum;
}

std::vector<double> SvmClassifier::predict(const Matrix& x) const {
  std::vector<double> out(static_cast<std::size_t>(x.rows()));
  std::vector<std::size_t> votes(n_classes_);
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    std::fill(votes.begin(), votes.end(), 0);
    for (const auto& m : machines_) {
      ++votes[decision(m, x, r) >= 0.0 ? m.positive : m.negative];
    }
    out[static_cast<std::size_t>(r)] = static_cast<double>(
        std::max_element(votes.begin(), votes.end()) - votes.begin());
  }
  return out;
}

void SvmRegressor::fit(const Matrix& x, const Vector& y) {
  if (x.rows() == 0 || x.rows() != y.size()) {
    throw Error(ErrorCode::kInvalidArgument, "SVR needs matching, non-empty X and y");
  }
  train_ = x;
  gamma_ = rbf_scale_gamma(x);
  const auto n = static_cast<std::size_t>(x.rows());
  Matrix k = kernel_matrix(x, gamma_);
  k.array() += 1.0;

  beta_.assign(n, 0.0);
  std::vector<double> kb(n, 0.0);  // (K + 1) beta
  const double c = params_.c;
  const double eps = params_.epsilon;
  passes_ = 0;
  for (; passes_ < params_.max_passes; ++passes_) {
    double max_change = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const auto ii = static_cast<Eigen::Index>(i);
      const double kii = k(ii, ii);
      const double grad = kb[i] - y(ii);
      const double target = beta_[i] - grad / kii;
      const double shrink = eps / kii;
      double updated = target > shrink ? target - shrink
                       : target < -shrink ? target + shrink
                                          : 0.0;
      updated = std::clamp(updated, -c, c);
      const double delta = updated - beta_[i];
      if (delta == 0.0) continue;
      for (std::size_t j = 0; j < n; ++j) {
        kb[j] += delta * k(static_cast<Eigen::Index>(j), ii);
      }
      beta_[i] = updated;
      max_change = std::max(max_change, std::abs(delta));
    }
    if (max_change < params_.tol) {
      ++passes_;
      break;
    }
  }
}

std::vector<double> SvmRegressor::predict(const Matrix& x) const {
  std::vector<double> out(static_cast<std::size_t>(x.rows()));
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    double sum = 0.0;
    for (std::size_t i = 0; i < beta_.size(); ++i) {
      if (beta_[i] == 0.0) continue;
      sum += beta_[i] *
             (rbf(train_, static_cast<Eigen::Index>(i), x, r, gamma_) + 1.0);
    }
    out[static_cast<std::size_t>(r)] = sum;
  }
  return out;
}

}  // namespace rxm::analytics
