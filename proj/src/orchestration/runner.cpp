#include "rxm/orchestration/runner.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "rxm/core/error.hpp"
#include "rxm/core/logger.hpp"
#include "rxm/hitl/report.hpp"
#include "rxm/perception/perception.hpp"
#include "rxm/preprocessing/features.hpp"
#include "rxm/preprocessing/pipeline.hpp"
#include "rxm/preprocessing/plan.hpp"
#include "rxm/preprocessing/schema.hpp"

namespace rxm::orchestration {

namespace {

namespace pp = rxm::preprocessing;
namespace an = rxm::analytics;
namespace op = rxm::optimization;
using hitl::Actor;
using perception::Cell;

std::string problem_label(an::TaskKind task) {
  switch (task) {
    case an::TaskKind::kClassification: return "Classification";
    case an::TaskKind::kRegression: return "Regression";
    case an::TaskKind::kAnomalyDetection: return "Anomaly Detection";
  }
  return "N/A";
}

// Sorted class labels of a discrete target, matching the fitted pipeline.
std::vector<std::string> class_labels(const perception::Column& target, bool numeric) {
  std::set<std::string> labels;
  for (const Cell& c : target) {
    if (numeric ? perception::is_number(c) : !perception::is_missing(c)) {
      labels.insert(perception::cell_to_string(c));
    }
  }
  return {labels.begin(), labels.end()};
}

bool target_present(const Cell& c, bool numeric) {
  return numeric ? perception::is_number(c) : !perception::is_missing(c);
}

struct State {
  std::optional<perception::DatasetFrame> frame;
  std::optional<perception::DatasetMetadata> metadata;
  std::vector<perception::QualityIssue> issues;
  std::optional<pp::SchemaMap> schema;
  std::optional<pp::FeatureReport> features;
  std::optional<pp::PreprocessPlan> plan;
  std::optional<pp::FittedPipeline> pipeline;
  bool backup_used = false;
  std::optional<std::string> backup_reason;
  an::TaskKind task = an::TaskKind::kAnomalyDetection;
  std::vector<std::size_t> model_rows;  // frame rows with a usable target (all rows if none)
  an::Split split;                      // positions into model_rows
  std::vector<std::string> train_ids;
  std::vector<std::string> test_ids;
  std::optional<an::TrainingSet> training;
  std::vector<std::string> skipped;
  std::optional<an::AdaptiveSearchLog> search;
  std::optional<op::RecommendationSet> recs;
  std::optional<op::ConfidenceAssessment> confidence;
  std::optional<hitl::ReviewOutcome> review;
};

class Runner {
 public:
  Runner(const RunConfig& config, Backend* planner, const RunIo& io, Backend* slm)
      : config_(config),
        planner_(planner),
        slm_(slm),
        io_(io),
        clock_(io.clock ? io.clock : system_clock()),
        logger_(io.log, clock_),
        started_(clock_()),
        audit_(clock_, audit_path(),
               config.auto_approve ? hitl::SinkPolicy::kWarnAndKeep : hitl::SinkPolicy::kFatal) {}

  RunResult run();

 private:
  std::optional<std::filesystem::path> audit_path() const {
    if (config_.log_dir.empty()) return std::nullopt;
    return config_.log_dir / fmt::format("audit_{}.jsonl", compact_timestamp(started_));
  }

  std::string dispatch(const std::string& tool);
  std::string load();
  std::string preprocess();
  std::string analyze();
  std::string recommend();
  std::string summarize();

  std::string choose_target(const pp::AmbiguousTargetError& e);
  void fit_with(pp::PreprocessPlan plan);
  nlohmann::json detailed() const;
  nlohmann::json recommendations_json() const;
  WorkflowReport build_report() const;

  const RunConfig& config_;
  Backend* planner_;
  Backend* slm_;
  RunIo io_;
  Clock clock_;
  Logger logger_;
  TimePoint started_;
  hitl::AuditLog audit_;
  WorkflowContext context_;
  State s_;
  std::optional<std::string> failure_;
  bool load_failed_ = false;
};

std::string Runner::dispatch(const std::string& tool) {
  if (tool == kToolLoad) return load();
  if (tool == kToolPreprocess) return preprocess();
  if (tool == kToolAnalyze) return analyze();
  if (tool == kToolRecommend) return recommend();
  if (tool == kToolSummarize) return summarize();
  throw Error(ErrorCode::kUnknownTool, fmt::format("unknown tool '{}'", tool));
}

std::string Runner::load() {
  s_ = State{};
  try {
    s_.frame = perception::load_csv(config_.data_path);
    s_.metadata = perception::inspect(*s_.frame);
  } catch (const Error& e) {
    throw Error(ErrorCode::kDataLoadFailure,
                fmt::format("cannot load '{}': {}", config_.data_path.string(), e.what()));
  }
  s_.issues = perception::flag_quality_issues(*s_.metadata);
  nlohmann::json issues = nlohmann::json::array();
  for (const auto& i : s_.issues) issues.push_back(perception::to_json(i));
  audit_.append(Actor::kPerception, "dataset_profiled",
                {{"rows", s_.metadata->n_rows},
                 {"columns", s_.metadata->n_cols},
                 {"estimated_memory_bytes", s_.metadata->estimated_memory_bytes},
                 {"duplicate_rows", s_.metadata->duplicate_row_count},
                 {"quality_issues", issues}});
  for (const auto& i : s_.issues) logger_.warn(fmt::format("Data quality: {}", i.detail));
  return fmt::format("loaded {} rows x {} columns, {} quality issue(s)", s_.metadata->n_rows,
                     s_.metadata->n_cols, s_.issues.size());
}

std::string Runner::choose_target(const pp::AmbiguousTargetError& e) {
  std::vector<std::string> candidates;
  for (const auto& c : e.candidates()) {
    const bool discrete = pp::is_discrete_target(s_.metadata->profile(c));
    if (!config_.task || config_.task == an::TaskKind::kAnomalyDetection ||
        (config_.task == an::TaskKind::kClassification) == discrete) {
      candidates.push_back(c);
    }
  }
  if (candidates.empty()) candidates = e.candidates();
  std::string chosen = candidates.back();
  std::string how = "last matching column";
  if (candidates.size() > 1 && !config_.auto_approve && io_.in != nullptr) {
    if (io_.out != nullptr) {
      *io_.out << "Several columns look like targets:\n";
      for (std::size_t i = 0; i < candidates.size(); ++i) {
        *io_.out << "  [" << i + 1 << "] " << candidates[i] << '\n';
      }
      *io_.out << "Choose the target [" << candidates.size() << "] > " << std::flush;
    }
    std::string line;
    if (std::getline(*io_.in, line)) {
      std::size_t pick = 0;
      std::istringstream(line) >> pick;
      if (pick >= 1 && pick <= candidates.size()) {
        chosen = candidates[pick - 1];
        how = "chosen by the reviewer";
      }
    }
    audit_.append(Actor::kHuman, "target_choice", {{"candidates", candidates}, {"input", line}});
  }
  audit_.append(Actor::kPreprocessing, "target_resolved",
                {{"candidates", e.candidates()}, {"compatible", candidates}, {"chosen", chosen}, {"how", how}});
  return chosen;
}

void Runner::fit_with(pp::PreprocessPlan plan) {
  const auto& frame = *s_.frame;
  std::vector<std::size_t> train_rows, test_rows;
  for (std::size_t p : s_.split.train) train_rows.push_back(s_.model_rows[p]);
  for (std::size_t p : s_.split.test) test_rows.push_back(s_.model_rows[p]);
  auto pipeline = pp::fit_pipeline(frame, plan, *s_.schema, train_rows);
  auto train = pp::apply_pipeline(pipeline, frame, train_rows);
  auto test = pp::apply_pipeline(pipeline, frame, test_rows);
  if (train.features.cols() == 0) {
    throw Error(ErrorCode::kNoFeatures, "the preprocessing plan keeps no model inputs");
  }
  if (!train.features.allFinite() || !test.features.allFinite()) {
    throw Error(ErrorCode::kInvalidArgument, "preprocessing produced non-finite values");
  }
  an::TrainingSet ts;
  ts.x_train = std::move(train.features);
  ts.x_test = std::move(test.features);
  ts.feature_names = train.feature_names;
  if (s_.task != an::TaskKind::kAnomalyDetection) {
    const bool clf = s_.task == an::TaskKind::kClassification;
    if (clf) ts.class_names = pipeline.target_classes;
    auto encode = [&](const std::vector<Cell>& cells) {
      std::vector<double> y;
      for (const Cell& c : cells) {
        if (clf) {
          const std::string label = perception::cell_to_string(c);
          const auto it = std::lower_bound(ts.class_names.begin(), ts.class_names.end(), label);
          y.push_back(static_cast<double>(it - ts.class_names.begin()));
        } else {
          y.push_back(*perception::numeric_value(c));
        }
      }
      return y;
    };
    ts.y_train = encode(*train.target);
    ts.y_test = encode(*test.target);
  }
  s_.train_ids = train.machine_ids();
  s_.test_ids = test.machine_ids();
  s_.training = std::move(ts);
  s_.pipeline = std::move(pipeline);
  s_.plan = std::move(plan);
}

std::string Runner::preprocess() {
  if (!s_.frame) throw Error(ErrorCode::kInvalidArgument, "preprocess_data requires load_and_inspect_data first");
  const auto& frame = *s_.frame;
  const auto& metadata = *s_.metadata;
  s_.schema.reset();
  s_.pipeline.reset();
  s_.training.reset();
  s_.search.reset();
  s_.recs.reset();
  s_.review.reset();
  s_.backup_used = false;
  s_.backup_reason.reset();

  pp::SchemaOptions options;
  options.target_hint = config_.target;
  pp::SchemaMap schema;
  try {
    schema = pp::discover_schema(frame, metadata, options);
  } catch (const pp::AmbiguousTargetError& e) {
    options.target_hint = choose_target(e);
    schema = pp::discover_schema(frame, metadata, options);
  }
  s_.task = an::infer_task(schema, metadata, config_.task);
  if (s_.task == an::TaskKind::kAnomalyDetection) schema = pp::demote_targets(std::move(schema), metadata);
  if (s_.task != an::TaskKind::kAnomalyDetection) {
    if (!schema.chosen_target) {
      throw Error(ErrorCode::kInvalidArgument,
                  fmt::format("a {} run needs a target column; pass --target", an::to_string(s_.task)));
    }
    const bool discrete = pp::is_discrete_target(metadata.profile(*schema.chosen_target));
    if (s_.task == an::TaskKind::kRegression && !metadata.profile(*schema.chosen_target).numeric_values) {
      throw Error(ErrorCode::kInvalidArgument,
                  fmt::format("regression target '{}' is not numeric", *schema.chosen_target));
    }
    if (s_.task == an::TaskKind::kClassification && !discrete) {
      throw Error(ErrorCode::kInvalidArgument,
                  fmt::format("classification target '{}' has more than {} distinct values",
                              *schema.chosen_target, pp::kMaxClassLevels));
    }
  }
  s_.schema = schema;
  audit_.append(Actor::kPreprocessing, "schema_discovered", pp::to_json(schema));
  audit_.append(Actor::kAnalytics, "task_inferred",
                {{"task", an::to_string(s_.task)},
                 {"override", config_.task ? nlohmann::json(an::to_string(*config_.task)) : nlohmann::json()},
                 {"target", schema.chosen_target ? nlohmann::json(*schema.chosen_target) : nlohmann::json()}});

  pp::FeatureAnalysisConfig fa;
  fa.seed = config_.seed;
  s_.features = pp::analyze_features(frame, metadata, schema, fa);
  audit_.append(Actor::kPreprocessing, "feature_analysis",
                {{"kept", s_.features->kept}, {"removed", pp::to_json(*s_.features)["removed"]}});

  pp::PreprocessPlan plan = pp::apply_feature_removals(pp::decide_tools(metadata, schema), *s_.features);
  if (slm_ != nullptr) {
    std::string query;
    for (const auto& d : plan.directives) {
      query += fmt::format("- {}: {}, {}, {} ({})\n", d.column, pp::to_string(d.imputation),
                           pp::to_string(d.scaling), pp::to_string(d.encoding), d.rationale);
    }
    if (auto advice = slm_advise(slm_, query, config_.slm_model_name, &context_)) {
      plan.advisory_notes.push_back("advisory only, not applied: " + *advice);
      audit_.append(Actor::kPreprocessing, "slm_advice", {{"text", *advice}});
    }
  }
  audit_.append(Actor::kPreprocessing, "preprocess_plan", pp::to_json(plan, nullptr));

  // Rows with a usable target, then the split.
  s_.model_rows.clear();
  std::vector<std::size_t> labels;
  const bool supervised = s_.task != an::TaskKind::kAnomalyDetection;
  if (supervised) {
    const auto& target = frame.column(*schema.chosen_target);
    const bool numeric = metadata.profile(*schema.chosen_target).numeric_values;
    const auto classes = class_labels(target, numeric);
    for (std::size_t r = 0; r < frame.n_rows(); ++r) {
      if (!target_present(target[r], numeric)) continue;
      s_.model_rows.push_back(r);
      if (s_.task == an::TaskKind::kClassification) {
        const auto label = perception::cell_to_string(target[r]);
        labels.push_back(static_cast<std::size_t>(
            std::lower_bound(classes.begin(), classes.end(), label) - classes.begin()));
      }
    }
    if (s_.model_rows.size() < 10) {
      throw Error(ErrorCode::kTooFewSamples,
                  fmt::format("{} rows carry a target value; at least 10 are needed", s_.model_rows.size()));
    }
    s_.split = an::split(s_.model_rows.size(), s_.task, labels, config_.train_ratio, config_.seed);
  } else {
    s_.model_rows.resize(frame.n_rows());
    std::iota(s_.model_rows.begin(), s_.model_rows.end(), 0);
    s_.split.train.assign(s_.model_rows.begin(), s_.model_rows.end());
    s_.split.test.clear();
  }

  try {
    fit_with(plan);
  } catch (const std::exception& e) {
    s_.backup_used = true;
    s_.backup_reason = e.what();
    logger_.warn(fmt::format("Preprocessing failed ({}); retrying with the backup plan", e.what()));
    pp::PreprocessPlan backup =
        pp::apply_feature_removals(pp::backup_plan(metadata, schema), *s_.features);
    backup.advisory_notes = plan.advisory_notes;
    audit_.append(Actor::kPreprocessing, "backup_plan", {{"reason", e.what()}, {"plan", pp::to_json(backup, nullptr)}});
    fit_with(std::move(backup));
  }

  const auto& ts = *s_.training;
  return fmt::format("{} task; target {}; {} feature columns -> {} model inputs; {} train / {} test rows{}",
                     an::to_string(s_.task), schema.chosen_target.value_or("none"),
                     schema.feature_columns().size(), ts.feature_names.size(), ts.x_train.rows(),
                     ts.x_test.rows(), s_.backup_used ? " (backup plan)" : "");
}

std::string Runner::analyze() {
  if (!s_.training) throw Error(ErrorCode::kInvalidArgument, "analyze_data requires preprocess_data first");
  s_.search.reset();
  s_.recs.reset();
  s_.review.reset();
  an::CandidateOptions options;
  options.seed = config_.seed;
  options.contamination = config_.contamination;
  const std::size_t n = s_.model_rows.size();
  const auto candidates = an::select_candidates(s_.task, n, options);
  s_.skipped = an::skipped_candidates(s_.task, n, options);
  nlohmann::json names = nlohmann::json::array();
  for (const auto& c : candidates) names.push_back(an::to_string(c.family));
  audit_.append(Actor::kAnalytics, "candidates_selected", {{"candidates", names}, {"skipped", s_.skipped}});
  for (const auto& s : s_.skipped) logger_.info(s);

  const auto& ts = *s_.training;
  an::ModelResult first = an::fit_predict_evaluate(ts, candidates.front(), s_.task);
  audit_.append(Actor::kAnalytics, "model_attempt", an::to_json(first));
  auto search = an::adaptive_search(
      s_.task, std::move(first), std::span<const an::ModelSpec>(candidates).subspan(1),
      [&](const an::ModelSpec& spec) {
        auto r = an::fit_predict_evaluate(ts, spec, s_.task);
        audit_.append(Actor::kAnalytics, "model_attempt", an::to_json(r));
        return r;
      },
      config_.trigger.adaptive);
  if (!search.trigger_reason.empty()) {
    audit_.append(Actor::kAnalytics, "adaptive_search",
                  {{"trigger", search.trigger_reason},
                   {"attempts", search.attempts.size()},
                   {"best", an::to_string(search.best().spec.family)}});
    logger_.info("Adaptive search triggered: " + search.trigger_reason);
  }
  s_.search = std::move(search);
  const auto& best = s_.search->best();
  std::string metric;
  if (const auto m = an::primary_metric(best, s_.task)) {
    metric = fmt::format("{}: {:.4f}", an::primary_metric_name(s_.task), *m);
  } else {
    metric = fmt::format("anomalies flagged: {} of {}", best.metrics.anomaly_count.value_or(0), n);
  }
  context_ = add_insight(std::move(context_), fmt::format("{} ({})", metric, an::to_string(best.spec.family)));
  return fmt::format("best model {} with {}; {} attempt(s)", an::to_string(best.spec.family), metric,
                     s_.search->attempts.size());
}

std::string Runner::recommend() {
  if (!s_.search) throw Error(ErrorCode::kInvalidArgument, "generate_recommendations requires analyze_data first");
  s_.recs.reset();
  s_.review.reset();
  const auto& best = s_.search->best();
  const auto& ts = *s_.training;
  op::RecommendConfig rc = config_.recommend;
  switch (s_.task) {
    case an::TaskKind::kClassification:
      s_.recs = op::recommend_classification(best, ts.class_names, {s_.test_ids, ts.x_test, ts.feature_names}, rc);
      break;
    case an::TaskKind::kRegression:
      s_.recs = op::recommend_regression(best, {s_.test_ids, ts.x_test, ts.feature_names}, rc);
      break;
    case an::TaskKind::kAnomalyDetection:
      s_.recs = op::recommend_anomaly(best.test_predictions, best.anomaly_flags,
                                      {s_.train_ids, ts.x_train, ts.feature_names}, rc);
      break;
  }
  for (const auto& w : s_.recs->warnings) logger_.warn(w);
  s_.confidence = op::assess_confidence(best.metrics, s_.task);
  if (s_.confidence->warning) logger_.warn("Model confidence: " + *s_.confidence->warning);
  const auto dist = op::priority_distribution(s_.recs->recommendations);
  audit_.append(Actor::kOptimization, "recommendations",
                {{"count", s_.recs->recommendations.size()},
                 {"candidates_before_cap", s_.recs->candidates_before_cap},
                 {"distribution", dist},
                 {"warnings", s_.recs->warnings},
                 {"confidence", op::to_json(*s_.confidence)}});
  return fmt::format("{} recommendation(s): Critical {}, Elevated {}, Routine {}; confidence {}",
                     s_.recs->recommendations.size(), dist.at("Critical"), dist.at("Elevated"),
                     dist.at("Routine"), op::to_string(s_.confidence->level));
}

std::string Runner::summarize() {
  if (!s_.recs) throw Error(ErrorCode::kInvalidArgument, "summarize requires generate_recommendations first");
  std::istringstream no_input;
  std::ostringstream no_output;
  std::istream& in = io_.in != nullptr ? *io_.in : no_input;
  std::ostream& out = io_.out != nullptr ? *io_.out : no_output;
  s_.review = hitl::review(s_.recs->recommendations, in, out,
                           config_.auto_approve ? hitl::ReviewMode::kAutoApprove : hitl::ReviewMode::kInteractive,
                           audit_, config_.recommend.actions);
  logger_.info("Recommendation Review - " + hitl::describe(*s_.review));
  return "review " + hitl::describe(*s_.review);
}

WorkflowReport Runner::build_report() const {
  WorkflowReport r = report_from_context(context_);
  r.dataset_name = config_.data_path.filename().string();
  if (s_.schema) {
    r.problem_type = problem_label(s_.task);
    r.feature_count = s_.schema->feature_columns().size();
  }
  if (s_.features) {
    r.feature_kept = s_.features->kept.size();
    r.feature_removed = s_.features->removed.size();
  }
  if (s_.search) {
    const auto& best = s_.search->best();
    ModelSummary m;
    m.model_name = std::string(an::to_string(best.spec.family));
    m.metric_name = std::string(an::primary_metric_name(s_.task));
    if (const auto v = an::primary_metric(best, s_.task)) m.metric_value = *v;
    if (s_.task == an::TaskKind::kAnomalyDetection) {
      m.metric_name = "anomalies";
      m.anomaly_count = best.metrics.anomaly_count;
      m.sample_count = s_.model_rows.size();
    }
    r.model_summary = m;
  }
  if (s_.recs) {
    r.recommendations_total = s_.recs->recommendations.size();
    r.priority_distribution = op::priority_distribution(s_.recs->recommendations);
  }
  if (s_.review) r.hitl_outcomes.push_back(hitl::describe(*s_.review));
  return r;
}

nlohmann::json Runner::recommendations_json() const {
  nlohmann::json proposed = s_.recs ? op::to_json(s_.recs->recommendations) : nlohmann::json::array();
  nlohmann::json approved = s_.review ? op::to_json(s_.review->approved) : nlohmann::json::array();
  return {{"dataset", config_.data_path.filename().string()},
          {"proposed", proposed},
          {"approved", approved},
          {"review_status", s_.review ? nlohmann::json(hitl::to_string(s_.review->status)) : nlohmann::json()}};
}

nlohmann::json Runner::detailed() const {
  nlohmann::json doc = nlohmann::json::object();
  nlohmann::json metadata = s_.metadata ? perception::to_json(*s_.metadata) : nlohmann::json::object();
  metadata["dataset"] = config_.data_path.filename().string();
  if (s_.metadata) {
    nlohmann::json issues = nlohmann::json::array();
    for (const auto& i : s_.issues) issues.push_back(perception::to_json(i));
    metadata["quality_issues"] = issues;
  }
  doc["metadata"] = metadata;
  if (failure_) {
    doc["failure"] = {{"message", *failure_},
                      {"step", context_.step_history.empty() ? "" : context_.step_history.back().tool_name}};
  }
  if (load_failed_) return doc;

  doc["schema"] = s_.schema ? pp::to_json(*s_.schema) : nlohmann::json();
  nlohmann::json plan;
  if (s_.plan) {
    plan = {{"directives", pp::to_json(*s_.plan, s_.pipeline ? &*s_.pipeline : nullptr)},
            {"advisory_notes", s_.plan->advisory_notes},
            {"backup", s_.backup_used},
            {"backup_reason", s_.backup_reason ? nlohmann::json(*s_.backup_reason) : nlohmann::json()},
            {"feature_analysis", s_.features ? pp::to_json(*s_.features) : nlohmann::json()},
            {"model_inputs", s_.training ? nlohmann::json(s_.training->feature_names) : nlohmann::json()}};
  }
  doc["preprocess_plan"] = plan;
  nlohmann::json attempts = nlohmann::json::array();
  if (s_.search) {
    for (const auto& a : s_.search->attempts) attempts.push_back(an::to_json(a));
  }
  doc["model_attempts"] = {{"attempts", attempts}, {"skipped", s_.skipped}};
  doc["adaptive_log"] = s_.search ? an::to_json(*s_.search) : nlohmann::json();
  doc["recommendations"] = recommendations_json();
  doc["confidence"] = s_.confidence ? op::to_json(*s_.confidence) : nlohmann::json();
  doc["review"] = s_.review ? hitl::to_json(*s_.review) : nlohmann::json();
  nlohmann::json steps = nlohmann::json::array();
  double total = 0.0;
  for (const auto& st : context_.step_history) {
    steps.push_back({{"tool", st.tool_name},
                     {"outcome", to_string(st.outcome)},
                     {"seconds", st.duration_seconds},
                     {"summary", st.summary}});
    total += st.duration_seconds;
  }
  doc["durations"] = {{"steps", steps}, {"total_seconds", total}};
  return doc;
}

RunResult Runner::run() {
  context_ = make_context(config_.goal, static_cast<std::int64_t>(config_.seed), config_.trigger.max_steps);
  audit_.append(Actor::kOrchestrator, "run_started",
                {{"dataset", config_.data_path.string()},
                 {"task", config_.task ? nlohmann::json(an::to_string(*config_.task)) : nlohmann::json("auto")},
                 {"target", config_.target ? nlohmann::json(*config_.target) : nlohmann::json()},
                 {"seed", config_.seed},
                 {"planner", planner_ != nullptr ? planner_->describe() : "rule_based"},
                 {"auto_approve", config_.auto_approve}});
  logger_.info(fmt::format("Workflow started: {}", config_.data_path.string()));

  bool finished = false;
  const PlannerIo pio{config_.model_name, &audit_, &logger_};
  while (context_.step_history.size() < context_.max_steps) {
    PlanOutcome plan = plan_next_step(std::move(context_), planner_, config_.trigger, pio);
    context_ = std::move(plan.context);
    const PlannerDecision& d = plan.decision;
    // A finish with a tool that has not yet succeeded runs it first.
    const bool already = std::any_of(context_.step_history.begin(), context_.step_history.end(),
                                     [&](const StepRecord& r) {
                                       return r.tool_name == d.tool && r.outcome == StepOutcome::kSucceeded;
                                     });
    if (d.finish && (d.tool.empty() || already)) {
      finished = true;
      if (!s_.review) failure_ = d.reason;
      break;
    }
    const TimePoint t0 = clock_();
    logger_.info(fmt::format("Executing tool: {}", d.tool));
    StepRecord record;
    try {
      const std::string summary = dispatch(d.tool);
      record = StepRecord::succeeded(d.tool, summary, seconds_between(t0, clock_()));
      logger_.info(fmt::format("Step {} succeeded in {:.2f}s: {}", d.tool, record.duration_seconds, summary));
    } catch (const std::exception& e) {
      record = StepRecord::failed(d.tool, e.what(), seconds_between(t0, clock_()));
      logger_.error(fmt::format("Step {} failed: {}", d.tool, e.what()));
      if (const auto* err = dynamic_cast<const Error*>(&e); err != nullptr && err->code() == ErrorCode::kDataLoadFailure) {
        load_failed_ = true;
      }
    }
    audit_.append(Actor::kOrchestrator, "step_completed",
                  {{"tool", record.tool_name},
                   {"outcome", to_string(record.outcome)},
                   {"seconds", record.duration_seconds},
                   {"summary", record.summary}});
    context_ = record_step(std::move(context_), std::move(record));
    if (load_failed_) {
      failure_ = *context_.step_history.back().error;
      break;
    }
    if (d.finish && context_.step_history.back().outcome == StepOutcome::kSucceeded) {
      finished = true;
      break;
    }
  }
  if (!finished && !load_failed_) {
    failure_ = fmt::format("{}: stopped after {} steps without finishing", to_string(ErrorCode::kMaxStepsExceeded),
                           context_.step_history.size());
    logger_.error(*failure_);
  }

  RunResult result;
  result.report = build_report();
  result.summary = hitl::render_summary(result.report);
  result.detailed_results = detailed();
  result.recommendations = recommendations_json();
  const bool completed = s_.review.has_value();
  if (load_failed_ || !completed) {
    result.exit_code = 1;
    if (!failure_) failure_ = "the workflow ended before the review gate";
  } else if (s_.review->status == hitl::ReviewStatus::kRejected) {
    result.exit_code = 2;
  }
  result.failure = failure_;
  audit_.append(Actor::kOrchestrator, "run_finished",
                {{"exit_code", result.exit_code},
                 {"steps_succeeded", result.report.steps_succeeded},
                 {"steps_total", result.report.steps_total},
                 {"failure", failure_ ? nlohmann::json(*failure_) : nlohmann::json()}});

  if (!config_.log_dir.empty()) {
    try {
      result.detailed_results_path = hitl::write_json_artifact(result.detailed_results, config_.log_dir,
                                                               "detailed_results", started_);
      logger_.info("Detailed results saved to: " + result.detailed_results_path->string());
      if (!load_failed_) {
        result.recommendations_path = hitl::write_json_artifact(result.recommendations, config_.log_dir,
                                                                "recommendations", started_);
      }
    } catch (const Error& e) {
      logger_.error(e.what());
      if (!config_.auto_approve) throw;
    }
    if (!audit_.sink_failure()) result.audit_path = audit_.path();
    else logger_.warn("Audit log kept in memory only: " + *audit_.sink_failure());
  }
  if (io_.out != nullptr) *io_.out << result.summary;
  result.review = s_.review;
  result.context = context_;
  result.audit = audit_.records();
  return result;
}

}  // namespace

RunResult run_workflow(const RunConfig& config, Backend* planner, const RunIo& io, Backend* slm) {
  Runner runner(config, planner, io, slm);
  return runner.run();
}

}  // namespace rxm::orchestration
