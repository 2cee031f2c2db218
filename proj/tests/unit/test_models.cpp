#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "oracles.hpp"
#include "rxm/analytics/models/isolation_forest.hpp"
#include "rxm/analytics/models/linear.hpp"
#include "rxm/analytics/models/svm.hpp"
#include "rxm/analytics/models/tree.hpp"
#include "rxm/core/error.hpp"
#include "rxm/core/rng.hpp"

using namespace rxm;
using namespace rxm::analytics;

namespace {

struct Regression {
  Matrix x;
  Vector y;
};

Regression make_regression(std::size_t n, std::size_t p, std::uint64_t seed, double noise = 0.1) {
  Rng rng(seed);
  Regression d{Matrix(n, p), Vector(n)};
  for (std::size_t i = 0; i < n; ++i) {
    double y = 4.0;
    for (std::size_t j = 0; j < p; ++j) {
      d.x(i, j) = rng.normal();
      y += (static_cast<double>(j) + 1.0) * (j % 2 == 0 ? 1.0 : -1.0) * d.x(i, j);
    }
    d.y(i) = y + rng.normal(0.0, noise);
  }
  return d;
}

test::Dense to_dense(const Matrix& x, bool with_intercept) {
  test::Dense out;
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    std::vector<double> row;
    for (Eigen::Index j = 0; j < x.cols(); ++j) row.push_back(x(i, j));
    if (with_intercept) row.push_back(1.0);
    out.push_back(row);
  }
  return out;
}

std::vector<double> to_std(const Vector& v) { return {v.data(), v.data() + v.size()}; }

}  // namespace

TEST_SUITE("models") {

TEST_CASE("ols matches the normal equations") {
  const auto d = make_regression(100, 3, 17);
  const auto fit = fit_linear_regression(d.x, d.y);
  const auto w = test::normal_equations(to_dense(d.x, true), to_std(d.y), 0.0);
  for (int j = 0; j < 3; ++j) CHECK(std::fabs(fit.coefficients(j) - w[j]) <= 1e-8);
  CHECK(std::fabs(fit.intercept - w[3]) <= 1e-8);
  const auto pred = fit.predict(d.x);
  CHECK(pred.size() == 100);
}

TEST_CASE("ridge matches its closed form with an unpenalized intercept") {
  const auto d = make_regression(100, 3, 23, 0.5);
  for (double alpha : {0.1, 1.0, 25.0}) {
    CAPTURE(alpha);
    const auto fit = fit_ridge(d.x, d.y, alpha);
    const auto w = test::normal_equations(to_dense(d.x, true), to_std(d.y), alpha, 3);
    for (int j = 0; j < 3; ++j) CHECK(std::fabs(fit.coefficients(j) - w[j]) <= 1e-6);
    CHECK(std::fabs(fit.intercept - w[3]) <= 1e-6);
  }
}

TEST_CASE("lasso zeroes every coefficient above the critical alpha") {
  const auto d = make_regression(100, 4, 31, 1.0);
  const Vector yc = d.y.array() - d.y.mean();
  const Matrix xc = d.x.rowwise() - d.x.colwise().mean();
  double alpha_max = 0.0;
  for (int j = 0; j < 4; ++j) alpha_max = std::max(alpha_max, std::fabs(xc.col(j).dot(yc)) / 100.0);
  for (double scale : {1.0, 1.5, 10.0}) {
    const auto fit = fit_lasso(d.x, d.y, alpha_max * scale);
    for (int j = 0; j < 4; ++j) CHECK(fit.coefficients(j) == 0.0);
    CHECK(fit.intercept == doctest::Approx(d.y.mean()).epsilon(1e-12));
  }
  CHECK(fit_lasso(d.x, d.y, alpha_max * 0.9).coefficients.cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("lasso solution satisfies the optimality conditions") {
  const auto d = make_regression(200, 5, 37, 1.0);
  const double alpha = 0.3;
  const auto fit = fit_lasso(d.x, d.y, alpha, 1e-10);
  const Matrix xc = d.x.rowwise() - d.x.colwise().mean();
  const Vector yc = d.y.array() - d.y.mean();
  const Vector r = yc - xc * fit.coefficients;
  for (int j = 0; j < 5; ++j) {
    const double g = xc.col(j).dot(r) / 200.0;
    if (fit.coefficients(j) != 0.0) {
      CHECK(g == doctest::Approx(alpha * (fit.coefficients(j) > 0 ? 1.0 : -1.0)).epsilon(1e-6));
    } else {
      CHECK(std::fabs(g) <= alpha + 1e-9);
    }
  }
}

TEST_CASE("forest of one unsampled tree equals that tree") {
  Rng rng(5);
  Matrix x(150, 4);
  std::vector<double> y(150);
  for (int i = 0; i < 150; ++i) {
    for (int j = 0; j < 4; ++j) x(i, j) = rng.normal();
    y[i] = x(i, 0) + 0.5 * x(i, 2) > 0.2 ? 1.0 : 0.0;
  }
  ForestParams fp;
  fp.n_estimators = 1;
  fp.n_classes = 2;
  fp.max_features = 4;
  fp.bootstrap = false;
  RandomForest forest(fp);
  forest.fit(x, y);
  REQUIRE(forest.trees().size() == 1);
  CHECK(forest.predict(x) == forest.trees()[0].predict(x));

  TreeParams tp;
  tp.n_classes = 2;
  DecisionTree tree(tp);
  Rng tree_rng(fp.seed);
  tree.fit(x, y, tree_rng);
  CHECK(forest.predict(x) == tree.predict(x));
  for (int i = 0; i < 150; ++i) CHECK(forest.predict_proba(x, i) == tree.predict_proba(x, i));

  fp.task = TreeTask::kRegression;
  fp.n_classes = 0;
  RandomForest reg(fp);
  std::vector<double> yr(150);
  for (int i = 0; i < 150; ++i) yr[i] = x(i, 1) * 3.0 + x(i, 3);
  reg.fit(x, yr);
  CHECK(reg.predict(x) == reg.trees()[0].predict(x));
}

TEST_CASE("tree fits separable data and importances normalize") {
  Rng rng(9);
  Matrix x(200, 3);
  std::vector<double> y(200);
  for (int i = 0; i < 200; ++i) {
    for (int j = 0; j < 3; ++j) x(i, j) = rng.uniform();
    y[i] = x(i, 1) > 0.5 ? 1.0 : 0.0;
  }
  TreeParams tp;
  tp.n_classes = 2;
  DecisionTree tree(tp);
  tree.fit(x, y, rng);
  CHECK(tree.predict(x) == y);
  ForestParams fp;
  fp.n_classes = 2;
  fp.n_estimators = 20;
  RandomForest forest(fp);
  forest.fit(x, y);
  const auto imp = forest.feature_importances();
  CHECK(std::accumulate(imp.begin(), imp.end(), 0.0) == doctest::Approx(1.0));
  CHECK(std::max_element(imp.begin(), imp.end()) - imp.begin() == 1);
  RandomForest again(fp);
  again.fit(x, y);
  CHECK(again.feature_importances() == imp);
}

TEST_CASE("logistic regression on separable classes") {
  Rng rng(13);
  Matrix x(300, 2);
  std::vector<double> y(300);
  for (int i = 0; i < 300; ++i) {
    const int c = i % 2;
    x(i, 0) = rng.normal(c == 0 ? -2.0 : 2.0, 0.7);
    x(i, 1) = rng.normal(c == 0 ? 1.0 : -1.0, 0.7);
    y[i] = c;
  }
  LogisticRegression lr;
  lr.fit(x, y, 2);
  CHECK(lr.iterations() <= 1000);
  const auto pred = lr.predict(x);
  std::size_t correct = 0;
  for (int i = 0; i < 300; ++i) correct += pred[i] == y[i] ? 1 : 0;
  CHECK(static_cast<double>(correct) / 300.0 >= 0.95);
  const auto& h = lr.loss_history();
  REQUIRE(h.size() >= 2);
  for (std::size_t i = 1; i < h.size(); ++i) CHECK(h[i] <= h[i - 1]);
  double total = 0.0;
  for (double p : lr.predict_proba(x, 0)) total += p;
  CHECK(total == doctest::Approx(1.0));
}

TEST_CASE("rbf gamma follows the scale rule") {
  Matrix x(2, 2);
  x << 0, 2, 4, 6;  // entries {0,2,4,6}: variance 5
  CHECK(rbf_scale_gamma(x) == doctest::Approx(1.0 / (2.0 * 5.0)));
  CHECK(rbf_scale_gamma(Matrix::Constant(3, 4, 1.0)) == doctest::Approx(0.25));
}

TEST_CASE("svm classifier and regressor learn simple structure") {
  Rng rng(21);
  Matrix x(160, 2);
  std::vector<double> y(160);
  for (int i = 0; i < 160; ++i) {
    const int c = i % 3 == 0 ? 0 : (i % 3 == 1 ? 1 : 2);
    x(i, 0) = rng.normal(c * 3.0, 0.5);
    x(i, 1) = rng.normal(c == 1 ? 3.0 : 0.0, 0.5);
    y[i] = c;
  }
  SvmClassifier svc;
  svc.fit(x, y, 3);
  const auto p = svc.predict(x);
  std::size_t correct = 0;
  for (int i = 0; i < 160; ++i) correct += p[i] == y[i] ? 1 : 0;
  CHECK(correct >= 150);

  Matrix xr(120, 1);
  Vector yr(120);
  for (int i = 0; i < 120; ++i) {
    xr(i, 0) = -3.0 + 6.0 * i / 119.0;
    yr(i) = std::sin(xr(i, 0));
  }
  SvmRegressor svr;
  svr.fit(xr, yr);
  const auto pr = svr.predict(xr);
  double mse = 0.0;
  for (int i = 0; i < 120; ++i) mse += (pr[i] - yr(i)) * (pr[i] - yr(i)) / 120.0;
  CHECK(mse < 0.02);
}

TEST_CASE("average path length") {
  CHECK(average_path_length(0) == 0.0);
  CHECK(average_path_length(1) == 0.0);
  CHECK(average_path_length(2) == doctest::Approx(1.0));
  for (std::size_t n : {3u, 10u, 256u, 4096u, 4097u, 100000u}) {
    CAPTURE(n);
    const double nd = static_cast<double>(n);
    CHECK(average_path_length(n) ==
          doctest::Approx(2.0 * test::harmonic_sum(n - 1) - 2.0 * (nd - 1.0) / nd).epsilon(1e-12));
  }
}

TEST_CASE("isolation forest flags exactly round(q n) rows") {
  Rng rng(3);
  Matrix x(1000, 3);
  for (int i = 0; i < 1000; ++i) {
    for (int j = 0; j < 3; ++j) x(i, j) = rng.normal();
  }
  for (double q : {0.01, 0.05, 0.1234, 0.5}) {
    CAPTURE(q);
    IsolationForestParams p;
    p.contamination = q;
    p.n_estimators = 50;
    IsolationForest forest(p);
    forest.fit(x);
    const auto scores = forest.score(x);
    const auto flags = forest.flag(scores);
    const auto flagged = static_cast<std::size_t>(std::count(flags.begin(), flags.end(), true));
    CHECK(flagged == static_cast<std::size_t>(std::llround(q * 1000.0)));
    double min_flagged = 1.0, max_clean = 0.0;
    for (int i = 0; i < 1000; ++i) {
      CHECK(scores[i] > 0.0);
      CHECK(scores[i] < 1.0);
      if (flags[i]) min_flagged = std::min(min_flagged, scores[i]);
      else max_clean = std::max(max_clean, scores[i]);
    }
    CHECK(min_flagged >= max_clean);
  }
  IsolationForestParams bad;
  bad.contamination = 0.7;
  IsolationForest invalid(bad);
  CHECK_THROWS_AS(invalid.fit(x), Error);
}

TEST_CASE("isolation forest: an extreme point scores above a duplicated one") {
  Matrix x(257, 2);
  Rng rng(8);
  for (int i = 0; i < 256; ++i) {
    x(i, 0) = i < 128 ? 0.0 : rng.normal(0.0, 0.1);
    x(i, 1) = i < 128 ? 0.0 : rng.normal(0.0, 0.1);
  }
  x(256, 0) = 50.0;
  x(256, 1) = -50.0;
  IsolationForestParams p;
  p.n_estimators = 100;
  IsolationForest forest(p);
  forest.fit(x);
  CHECK(forest.subsample_size() == 256);
  const auto s = forest.score(x);
  CHECK(s[256] > 0.6);
  CHECK(s[256] > s[0] + 0.2);
  const auto flags = forest.flag(s);  // auto threshold
  CHECK(flags[256]);
  CHECK_FALSE(flags[0]);
}

}  // TEST_SUITE
