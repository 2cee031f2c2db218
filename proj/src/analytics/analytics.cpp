#include "rxm/analytics/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include <fmt/format.h>

#include "rxm/analytics/models/isolation_forest.hpp"
#include "rxm/analytics/models/linear.hpp"
#include "rxm/analytics/models/svm.hpp"
#include "rxm/core/error.hpp"

namespace rxm::analytics {

std::string_view to_string(TaskKind kind) {
  switch (kind) {
    case TaskKind::kClassification: return "classification";
    case TaskKind::kRegression: return "regression";
    case TaskKind::kAnomalyDetection: return "anomaly_detection";
  }
  return "unknown";
}

std::optional<TaskKind> parse_task(std::string_view text) {
  if (text == "classification") return TaskKind::kClassification;
  if (text == "regression") return TaskKind::kRegression;
  if (text == "anomaly" || text == "anomaly_detection") return TaskKind::kAnomalyDetection;
  return std::nullopt;
}

TaskKind infer_task(const preprocessing::SchemaMap& schema,
                    const perception::DatasetMetadata& metadata,
                    std::optional<TaskKind> override_kind) {
  if (override_kind) return *override_kind;
  if (!schema.chosen_target) return TaskKind::kAnomalyDetection;
  return preprocessing::is_discrete_target(metadata.profile(*schema.chosen_target))
             ? TaskKind::kClassification
             : TaskKind::kRegression;
}

std::string_view to_string(ModelFamily family) {
  switch (family) {
    case ModelFamily::kRandomForestClf: return "random_forest_clf";
    case ModelFamily::kLogisticRegression: return "logistic_regression";
    case ModelFamily::kSvmRbfClf: return "svm_rbf_clf";
    case ModelFamily::kRandomForestReg: return "random_forest_reg";
    case ModelFamily::kLinearRegression: return "linear_regression";
    case ModelFamily::kRidge: return "ridge";
    case ModelFamily::kLasso: return "lasso";
    case ModelFamily::kSvrRbf: return "svr_rbf";
    case ModelFamily::kIsolationForest: return "isolation_forest";
  }
  return "unknown";
}

namespace {

ModelSpec make_spec(ModelFamily family, nlohmann::json hp, std::uint64_t seed) {
  return {family, std::move(hp), seed};
}

nlohmann::json svm_hyperparameters() {
  return {{"kernel", "rbf"}, {"C", 1.0}, {"gamma", "scale"}, {"tol", 1e-3}, {"max_passes", 200}};
}

bool svm_allowed(std::size_t n, const CandidateOptions& options) {
  return n <= options.svm_max_samples;
}

}  // namespace

std::vector<ModelSpec> select_candidates(TaskKind task, std::size_t n_samples,
                                         const CandidateOptions& options) {
  if (n_samples < 10) {
    throw Error(ErrorCode::kTooFewSamples,
                fmt::format("{} samples; at least 10 are needed to train a model", n_samples));
  }
  std::vector<ModelSpec> out;
  const std::uint64_t seed = options.seed;
  switch (task) {
    case TaskKind::kClassification: {
      const std::size_t trees = std::min<std::size_t>(100, std::max<std::size_t>(10, n_samples / 10));
      out.push_back(make_spec(ModelFamily::kRandomForestClf,
                              {{"n_estimators", trees}, {"max_depth", nullptr},
                               {"min_samples_split", 2}, {"max_features", "sqrt"},
                               {"bootstrap", true}},
                              seed));
      out.push_back(make_spec(ModelFamily::kLogisticRegression,
                              {{"max_iter", 1000}, {"l2", 1.0}, {"tol", 1e-6}}, seed));
      if (svm_allowed(n_samples, options)) {
        out.push_back(make_spec(ModelFamily::kSvmRbfClf, svm_hyperparameters(), seed));
      }
      break;
    }
    case TaskKind::kRegression: {
      out.push_back(make_spec(ModelFamily::kLinearRegression, nlohmann::json::object(), seed));
      out.push_back(make_spec(ModelFamily::kRidge, {{"alpha", 1.0}}, seed));
      out.push_back(make_spec(ModelFamily::kLasso, {{"alpha", 1.0}, {"tol", 1e-7}}, seed));
      out.push_back(make_spec(ModelFamily::kRandomForestReg,
                              {{"n_estimators", 100}, {"max_depth", nullptr},
                               {"min_samples_split", 2}, {"max_features", "p/3"},
                               {"bootstrap", true}},
                              seed));
      if (svm_allowed(n_samples, options)) {
        nlohmann::json hp = svm_hyperparameters();
        hp["epsilon"] = 0.1;
        out.push_back(make_spec(ModelFamily::kSvrRbf, std::move(hp), seed));
      }
      break;
    }
    case TaskKind::kAnomalyDetection: {
      nlohmann::json hp = {{"n_estimators", 200}, {"max_samples", 256}};
      hp["contamination"] = options.contamination ? nlohmann::json(*options.contamination)
                                                  : nlohmann::json("auto");
      out.push_back(make_spec(ModelFamily::kIsolationForest, std::move(hp), seed));
      break;
    }
  }
  return out;
}

std::vector<std::string> skipped_candidates(TaskKind task, std::size_t n_samples,
                                            const CandidateOptions& options) {
  if (task == TaskKind::kAnomalyDetection || svm_allowed(n_samples, options)) return {};
  const auto family = task == TaskKind::kClassification ? ModelFamily::kSvmRbfClf
                                                        : ModelFamily::kSvrRbf;
  return {fmt::format("{} skipped: {} samples > {}", to_string(family), n_samples,
                      options.svm_max_samples)};
}

Split split(std::size_t n_rows, TaskKind task, std::span<const std::size_t> labels,
            double ratio, std::uint64_t seed) {
  if (!(ratio > 0.0 && ratio < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, fmt::format("split ratio {} not in (0, 1)", ratio));
  }
  const double test_share = 1.0 - ratio;
  const auto n_test = static_cast<std::size_t>(std::llround(static_cast<double>(n_rows) * test_share));
  Rng rng(seed);
  Split out;
  std::vector<bool> is_test(n_rows, false);

  if (task == TaskKind::kClassification) {
    if (labels.size() != n_rows) {
      throw Error(ErrorCode::kInvalidArgument, "stratified split needs one label per row");
    }
    std::map<std::size_t, std::vector<std::size_t>> members;
    for (std::size_t i = 0; i < n_rows; ++i) members[labels[i]].push_back(i);
    for (const auto& [label, rows] : members) {
      if (rows.size() < 2) {
        throw Error(ErrorCode::kClassTooSmall,
                    fmt::format("class {} has {} member(s); stratified splitting needs 2",
                                label, rows.size()));
      }
    }
    // Largest-remainder allocation of n_test across classes, keeping at
    // least one training row per class.
    struct Share {
      std::size_t label;
      std::size_t count;
      double remainder;
      std::size_t cap;
    };
    std::vector<Share> shares;
    std::size_t allocated = 0;
    for (const auto& [label, rows] : members) {
      const double ideal = static_cast<double>(rows.size()) * static_cast<double>(n_test) /
                           static_cast<double>(n_rows);
      const auto base = std::min(static_cast<std::size_t>(std::floor(ideal)), rows.size() - 1);
      shares.push_back({label, base, ideal - std::floor(ideal), rows.size() - 1});
      allocated += base;
    }
    std::vector<std::size_t> order(shares.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return shares[a].remainder > shares[b].remainder;
    });
    while (allocated < n_test) {
      bool progressed = false;
      for (std::size_t i : order) {
        if (allocated == n_test) break;
        if (shares[i].count < shares[i].cap) {
          ++shares[i].count;
          ++allocated;
          progressed = true;
        }
      }
      if (!progressed) break;
    }
    for (const auto& share : shares) {
      std::vector<std::size_t> rows = members[share.label];
      rng.shuffle(std::span<std::size_t>(rows));
      for (std::size_t k = 0; k < share.count; ++k) is_test[rows[k]] = true;
    }
  } else {
    std::vector<std::size_t> rows(n_rows);
    std::iota(rows.begin(), rows.end(), 0);
    rng.shuffle(std::span<std::size_t>(rows));
    for (std::size_t k = 0; k < n_test; ++k) is_test[rows[k]] = true;
  }
  for (std::size_t i = 0; i < n_rows; ++i) (is_test[i] ? out.test : out.train).push_back(i);
  return out;
}

Metrics classification_metrics(std::span<const std::size_t> truth,
                               std::span<const std::size_t> predicted,
                               const std::vector<std::string>& class_names) {
  if (truth.size() != predicted.size() || truth.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "classification metrics need equal non-empty vectors");
  }
  std::set<std::size_t> labels(truth.begin(), truth.end());
  labels.insert(predicted.begin(), predicted.end());
  std::size_t correct = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) correct += truth[i] == predicted[i];

  Metrics m;
  m.accuracy = static_cast<double>(correct) / static_cast<double>(truth.size());
  std::map<std::string, ClassReport> per_class;
  double sp = 0.0, sr = 0.0, sf = 0.0;
  for (std::size_t label : labels) {
    std::size_t tp = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
      if (predicted[i] == label && truth[i] == label) ++tp;
      else if (predicted[i] == label) ++fp;
      else if (truth[i] == label) ++fn;
    }
    ClassReport r;
    r.support = tp + fn;
    r.precision = tp + fp == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fp);
    r.recall = tp + fn == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fn);
    r.f1 = r.precision + r.recall == 0.0
               ? 0.0
               : 2.0 * r.precision * r.recall / (r.precision + r.recall);
    sp += r.precision;
    sr += r.recall;
    sf += r.f1;
    const std::string name = label < class_names.size() ? class_names[label]
                                                        : std::to_string(label);
    per_class[name] = r;
  }
  const auto k = static_cast<double>(labels.size());
  m.macro_precision = sp / k;
  m.macro_recall = sr / k;
  m.macro_f1 = sf / k;
  m.per_class = std::move(per_class);
  return m;
}

Metrics regression_metrics(std::span<const double> truth, std::span<const double> predicted) {
  if (truth.size() != predicted.size() || truth.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "regression metrics need equal non-empty vectors");
  }
  const auto n = static_cast<double>(truth.size());
  double mean = 0.0;
  for (double t : truth) mean += t;
  mean /= n;
  double ss_res = 0.0, ss_tot = 0.0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    ss_res += (truth[i] - predicted[i]) * (truth[i] - predicted[i]);
    ss_tot += (truth[i] - mean) * (truth[i] - mean);
  }
  Metrics m;
  m.mse = ss_res / n;
  m.r2 = ss_tot == 0.0 ? (ss_res == 0.0 ? 1.0 : 0.0) : 1.0 - ss_res / ss_tot;
  return m;
}

TargetStats target_stats(std::span<const double> values) {
  TargetStats s;
  s.n = values.size();
  if (values.empty()) return s;
  for (double v : values) s.mean += v;
  s.mean /= static_cast<double>(values.size());
  double ss = 0.0;
  for (double v : values) ss += (v - s.mean) * (v - s.mean);
  s.std = std::sqrt(ss / static_cast<double>(values.size()));
  return s;
}

namespace {

template <typename T>
T hp_or(const nlohmann::json& hp, const char* key, T fallback) {
  const auto it = hp.find(key);
  if (it == hp.end() || it->is_null() || it->is_string()) return fallback;
  return it->get<T>();
}

std::vector<std::size_t> as_labels(const std::vector<double>& values) {
  std::vector<std::size_t> out;
  out.reserve(values.size());
  for (double v : values) out.push_back(static_cast<std::size_t>(std::llround(v)));
  return out;
}

std::map<std::string, double> normalized(const std::vector<std::string>& names,
                                         std::vector<double> weights, std::string* method) {
  double total = 0.0;
  for (double& w : weights) {
    if (!(w > 0.0) || !std::isfinite(w)) w = 0.0;
    total += w;
  }
  std::map<std::string, double> out;
  if (total <= 0.0) {
    *method += " (all zero; uniform weights)";
    for (const auto& n : names) out[n] = 1.0 / static_cast<double>(names.size());
    return out;
  }
  for (std::size_t j = 0; j < names.size(); ++j) out[names[j]] = weights[j] / total;
  return out;
}

std::vector<double> column_stds(const Matrix& x) {
  std::vector<double> out(static_cast<std::size_t>(x.cols()), 0.0);
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    const double mean = x.col(j).mean();
    out[static_cast<std::size_t>(j)] =
        std::sqrt((x.col(j).array() - mean).square().sum() / static_cast<double>(x.rows()));
  }
  return out;
}

double score_of(TaskKind task, const std::vector<double>& truth, const std::vector<double>& pred) {
  if (task == TaskKind::kClassification) {
    std::size_t correct = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) correct += std::llround(truth[i]) == std::llround(pred[i]);
    return static_cast<double>(correct) / static_cast<double>(truth.size());
  }
  return *regression_metrics(truth, pred).r2;
}

// Drop in the primary metric when one test column is shuffled.
template <typename Predict>
std::vector<double> permutation_drop(const TrainingSet& data, TaskKind task, std::uint64_t seed,
                                     const Predict& predict) {
  std::vector<double> out(static_cast<std::size_t>(data.x_test.cols()), 0.0);
  if (data.x_test.rows() < 2) return out;
  const double base = score_of(task, data.y_test, predict(data.x_test));
  Rng rng(seed);
  for (Eigen::Index j = 0; j < data.x_test.cols(); ++j) {
    Matrix shuffled = data.x_test;
    std::vector<double> column(shuffled.col(j).data(), shuffled.col(j).data() + shuffled.rows());
    rng.shuffle(std::span<double>(column));
    for (Eigen::Index i = 0; i < shuffled.rows(); ++i) shuffled(i, j) = column[static_cast<std::size_t>(i)];
    out[static_cast<std::size_t>(j)] = base - score_of(task, data.y_test, predict(shuffled));
  }
  return out;
}

void check_finite(const std::vector<double>& values) {
  for (double v : values) {
    if (!std::isfinite(v)) throw Error(ErrorCode::kInvalidArgument, "model produced a non-finite output");
  }
}

void train(const TrainingSet& data, const ModelSpec& spec, TaskKind task, ModelResult& result) {
  const auto& hp = spec.hyperparameters;
  if (data.x_train.rows() == 0) throw Error(ErrorCode::kEmptyTrainSet, "no training rows");
  const std::size_t n_classes = data.class_names.size();
  const Vector y_train = Eigen::Map<const Vector>(data.y_train.data(),
                                                  static_cast<Eigen::Index>(data.y_train.size()));
  auto finish_linear = [&](const LinearFit& fit) {
    result.test_predictions = fit.predict(data.x_test);
    const auto stds = column_stds(data.x_train);
    std::vector<double> w(stds.size());
    for (std::size_t j = 0; j < w.size(); ++j) {
      w[j] = std::abs(fit.coefficients(static_cast<Eigen::Index>(j))) * stds[j];
    }
    result.importance_method = "|coefficient| x feature std";
    result.feature_importances = normalized(data.feature_names, w, &result.importance_method);
  };

  switch (spec.family) {
    case ModelFamily::kRandomForestClf:
    case ModelFamily::kRandomForestReg: {
      const bool clf = spec.family == ModelFamily::kRandomForestClf;
      ForestParams fp;
      fp.task = clf ? TreeTask::kClassification : TreeTask::kRegression;
      fp.n_classes = n_classes;
      fp.n_estimators = hp_or<std::size_t>(hp, "n_estimators", 100);
      fp.max_depth = hp_or<std::size_t>(hp, "max_depth", 0);
      fp.min_samples_split = hp_or<std::size_t>(hp, "min_samples_split", 2);
      fp.max_features = hp_or<std::size_t>(hp, "max_features", 0);
      fp.bootstrap = hp_or<bool>(hp, "bootstrap", true);
      fp.seed = spec.seed;
      RandomForest forest(fp);
      forest.fit(data.x_train, data.y_train);
      result.test_predictions = forest.predict(data.x_test);
      if (clf) {
        for (Eigen::Index i = 0; i < data.x_test.rows(); ++i) {
          result.test_probabilities.push_back(forest.predict_proba(data.x_test, i));
        }
      }
      result.importance_method = "mean impurity decrease";
      result.feature_importances =
          normalized(data.feature_names, forest.feature_importances(), &result.importance_method);
      break;
    }
    case ModelFamily::kLogisticRegression: {
      LogisticParams lp;
      lp.max_iter = hp_or<std::size_t>(hp, "max_iter", 1000);
      lp.l2 = hp_or<double>(hp, "l2", 1.0);
      lp.tol = hp_or<double>(hp, "tol", 1e-6);
      LogisticRegression model(lp);
      model.fit(data.x_train, data.y_train, n_classes);
      result.test_predictions = model.predict(data.x_test);
      for (Eigen::Index i = 0; i < data.x_test.rows(); ++i) {
        result.test_probabilities.push_back(model.predict_proba(data.x_test, i));
      }
      const auto stds = column_stds(data.x_train);
      std::vector<double> w(stds.size(), 0.0);
      for (std::size_t j = 0; j < w.size(); ++j) {
        w[j] = model.weights().row(static_cast<Eigen::Index>(j)).cwiseAbs().sum() * stds[j];
      }
      result.importance_method = "sum over classes of |coefficient| x feature std";
      result.feature_importances = normalized(data.feature_names, w, &result.importance_method);
      break;
    }
    case ModelFamily::kSvmRbfClf:
    case ModelFamily::kSvrRbf: {
      SvmParams sp;
      sp.c = hp_or<double>(hp, "C", 1.0);
      sp.tol = hp_or<double>(hp, "tol", 1e-3);
      sp.max_passes = hp_or<std::size_t>(hp, "max_passes", 200);
      sp.epsilon = hp_or<double>(hp, "epsilon", 0.1);
      sp.seed = spec.seed;
      std::vector<double> drops;
      if (spec.family == ModelFamily::kSvmRbfClf) {
        SvmClassifier model(sp);
        model.fit(data.x_train, data.y_train, n_classes);
        result.test_predictions = model.predict(data.x_test);
        for (double p : result.test_predictions) {
          std::vector<double> one_hot(n_classes, 0.0);
          one_hot.at(static_cast<std::size_t>(p)) = 1.0;
          result.test_probabilities.push_back(std::move(one_hot));
        }
        drops = permutation_drop(data, task, spec.seed,
                                 [&](const Matrix& x) { return model.predict(x); });
      } else {
        SvmRegressor model(sp);
        model.fit(data.x_train, y_train);
        result.test_predictions = model.predict(data.x_test);
        drops = permutation_drop(data, task, spec.seed,
                                 [&](const Matrix& x) { return model.predict(x); });
      }
      result.importance_method = "test-set permutation drop in the primary metric";
      result.feature_importances = normalized(data.feature_names, drops, &result.importance_method);
      break;
    }
    case ModelFamily::kLinearRegression:
      finish_linear(fit_linear_regression(data.x_train, y_train));
      break;
    case ModelFamily::kRidge:
      finish_linear(fit_ridge(data.x_train, y_train, hp_or<double>(hp, "alpha", 1.0)));
      break;
    case ModelFamily::kLasso:
      finish_linear(fit_lasso(data.x_train, y_train, hp_or<double>(hp, "alpha", 1.0),
                              hp_or<double>(hp, "tol", 1e-7)));
      break;
    case ModelFamily::kIsolationForest: {
      IsolationForestParams ip;
      ip.n_estimators = hp_or<std::size_t>(hp, "n_estimators", 200);
      ip.max_samples = hp_or<std::size_t>(hp, "max_samples", 256);
      if (const auto it = hp.find("contamination"); it != hp.end() && it->is_number()) {
        ip.contamination = it->get<double>();
      }
      ip.seed = spec.seed;
      IsolationForest forest(ip);
      forest.fit(data.x_train);
      auto scores = forest.score(data.x_train);
      result.anomaly_flags = forest.flag(scores);
      result.metrics.anomaly_count = static_cast<std::size_t>(
          std::count(result.anomaly_flags.begin(), result.anomaly_flags.end(), true));
      result.test_predictions = scores;
      result.metrics.anomaly_scores = std::move(scores);
      check_finite(result.test_predictions);
      return;
    }
  }
  check_finite(result.test_predictions);

  if (task == TaskKind::kClassification) {
    result.metrics = classification_metrics(as_labels(data.y_test), as_labels(result.test_predictions),
                                            data.class_names);
  } else {
    result.metrics = regression_metrics(data.y_test, result.test_predictions);
    result.train_target_stats = target_stats(data.y_train);
  }
}

bool family_matches(ModelFamily family, TaskKind task) {
  switch (family) {
    case ModelFamily::kRandomForestClf:
    case ModelFamily::kLogisticRegression:
    case ModelFamily::kSvmRbfClf:
      return task == TaskKind::kClassification;
    case ModelFamily::kIsolationForest:
      return task == TaskKind::kAnomalyDetection;
    default:
      return task == TaskKind::kRegression;
  }
}

}  // namespace

ModelResult fit_predict_evaluate(const TrainingSet& data, const ModelSpec& spec, TaskKind task) {
  ModelResult result;
  result.spec = spec;
  try {
    if (!family_matches(spec.family, task)) {
      throw Error(ErrorCode::kInvalidArgument,
                  fmt::format("{} cannot serve a {} task", to_string(spec.family), to_string(task)));
    }
    if (task != TaskKind::kAnomalyDetection && data.x_test.rows() == 0) {
      throw Error(ErrorCode::kInvalidArgument, "no evaluation rows");
    }
    if (data.x_train.cols() != data.x_test.cols() && task != TaskKind::kAnomalyDetection) {
      throw Error(ErrorCode::kInvalidArgument, "train and test widths differ");
    }
    train(data, spec, task, result);
  } catch (const std::exception& e) {
    ModelResult failed;
    failed.spec = spec;
    failed.status = ModelStatus::kTrainingFailed;
    failed.error = e.what();
    return failed;
  }
  return result;
}

std::string_view primary_metric_name(TaskKind task) {
  switch (task) {
    case TaskKind::kClassification: return "accuracy";
    case TaskKind::kRegression: return "r2";
    case TaskKind::kAnomalyDetection: return "anomaly_count";
  }
  return "";
}

std::optional<double> primary_metric(const ModelResult& result, TaskKind task) {
  if (!result.ok()) return std::nullopt;
  if (task == TaskKind::kClassification) return result.metrics.accuracy;
  if (task == TaskKind::kRegression) return result.metrics.r2;
  return std::nullopt;
}

std::optional<std::string> exploration_trigger(const ModelResult& result, TaskKind task,
                                               const AdaptiveThresholds& thresholds) {
  if (!result.ok()) {
    return fmt::format("{} failed: {}", to_string(result.spec.family), result.error);
  }
  const auto m = primary_metric(result, task);
  if (task == TaskKind::kClassification && m && *m < thresholds.min_accuracy) {
    return fmt::format("accuracy {:.4f} < {}", *m, thresholds.min_accuracy);
  }
  if (task == TaskKind::kRegression && m && *m < thresholds.min_r2) {
    return fmt::format("r2 {:.4f} < {}", *m, thresholds.min_r2);
  }
  return std::nullopt;
}

AdaptiveSearchLog adaptive_search(TaskKind task, ModelResult first,
                                  std::span<const ModelSpec> remaining, const Trainer& train,
                                  const AdaptiveThresholds& thresholds) {
  AdaptiveSearchLog log;
  log.primary_metric_name = std::string(primary_metric_name(task));
  const auto trigger = exploration_trigger(first, task, thresholds);
  log.attempts.push_back(std::move(first));
  if (trigger) {
    log.trigger_reason = *trigger;
    for (const auto& spec : remaining) log.attempts.push_back(train(spec));
  }
  std::optional<std::size_t> best;
  double best_value = 0.0;
  for (std::size_t i = 0; i < log.attempts.size(); ++i) {
    const ModelResult& a = log.attempts[i];
    if (!a.ok()) continue;
    const auto m = primary_metric(a, task);
    const double value = m.value_or(0.0);
    if (!best || value > best_value) {
      best = i;
      best_value = value;
    }
  }
  if (!best) {
    std::string detail;
    for (const auto& a : log.attempts) {
      detail += fmt::format("{}{}: {}", detail.empty() ? "" : "; ", to_string(a.spec.family), a.error);
    }
    throw Error(ErrorCode::kAllModelsFailed, "every candidate model failed: " + detail);
  }
  log.best_index = *best;
  return log;
}

AdaptiveSearchLog adaptive_search(const TrainingSet& data, TaskKind task, ModelResult first,
                                  std::span<const ModelSpec> remaining,
                                  const AdaptiveThresholds& thresholds) {
  return adaptive_search(
      task, std::move(first), remaining,
      [&](const ModelSpec& spec) { return fit_predict_evaluate(data, spec, task); }, thresholds);
}

nlohmann::json to_json(const ModelSpec& spec) {
  return {{"family", to_string(spec.family)},
          {"hyperparameters", spec.hyperparameters},
          {"seed", spec.seed}};
}

nlohmann::json to_json(const Metrics& m) {
  nlohmann::json out = nlohmann::json::object();
  auto put = [&](const char* key, const std::optional<double>& v) {
    if (v) out[key] = *v;
  };
  put("accuracy", m.accuracy);
  put("macro_precision", m.macro_precision);
  put("macro_recall", m.macro_recall);
  put("macro_f1", m.macro_f1);
  put("r2", m.r2);
  put("mse", m.mse);
  if (m.per_class) {
    nlohmann::json pc = nlohmann::json::object();
    for (const auto& [name, r] : *m.per_class) {
      pc[name] = {{"precision", r.precision}, {"recall", r.recall}, {"f1", r.f1}, {"support", r.support}};
    }
    out["per_class"] = pc;
  }
  if (m.anomaly_count) out["anomaly_count"] = *m.anomaly_count;
  if (m.anomaly_scores && !m.anomaly_scores->empty()) {
    const auto& s = *m.anomaly_scores;
    const auto [lo, hi] = std::minmax_element(s.begin(), s.end());
    out["anomaly_scores"] = {{"count", s.size()},
                             {"min", *lo},
                             {"max", *hi},
                             {"mean", std::accumulate(s.begin(), s.end(), 0.0) /
                                          static_cast<double>(s.size())}};
  }
  return out;
}

nlohmann::json to_json(const ModelResult& r) {
  nlohmann::json out = {
      {"spec", to_json(r.spec)},
      {"status", r.ok() ? "ok" : "training_failed"},
  };
  if (!r.ok()) {
    out["error"] = r.error;
    return out;
  }
  out["metrics"] = to_json(r.metrics);
  if (r.feature_importances) {
    out["feature_importances"] = *r.feature_importances;
    out["importance_method"] = r.importance_method;
  }
  if (r.train_target_stats) {
    out["train_target_stats"] = {{"mean", r.train_target_stats->mean},
                                 {"std", r.train_target_stats->std},
                                 {"n", r.train_target_stats->n}};
  }
  return out;
}

nlohmann::json to_json(const AdaptiveSearchLog& log) {
  nlohmann::json attempts = nlohmann::json::array();
  for (const auto& a : log.attempts) attempts.push_back(to_json(a));
  return {{"triggered", !log.trigger_reason.empty()},
          {"trigger_reason", log.trigger_reason},
          {"attempts", attempts},
          {"best_index", log.best_index},
          {"primary_metric", log.primary_metric_name}};
}

}  // namespace rxm::analytics
