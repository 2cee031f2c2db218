#include <doctest.h>

#include "rxm/core/clock.hpp"
#include "rxm/core/error.hpp"
#include "rxm/core/rng.hpp"
#include "rxm/core/workflow.hpp"
#include "support.hpp"

using namespace rxm;

TEST_SUITE("core") {

TEST_CASE("record_step advances the index and keeps history") {
  auto ctx = make_context("goal");
  CHECK(ctx.available_tools.size() == 5);
  ctx = record_step(std::move(ctx), StepRecord::succeeded(std::string(kToolLoad), "ok", 0.5));
  CHECK(ctx.step_history.size() == 1);
  CHECK(ctx.current_step_index == 1);
  CHECK_FALSE(ctx.error_context.has_value());
}

TEST_CASE("five succeeded steps make a report-ready context") {
  auto ctx = make_context("goal");
  for (const auto& tool : default_tool_registry()) {
    ctx = record_step(std::move(ctx), StepRecord::succeeded(tool.name, "ok", 1.0));
  }
  CHECK(ctx.current_step_index == 5);
  const auto report = report_from_context(ctx);
  CHECK(report.steps_succeeded == 5);
  CHECK(report.steps_total == 5);
  CHECK(report.total_duration_seconds == doctest::Approx(5.0));
}

TEST_CASE("a failed step sets the error context") {
  auto ctx = record_step(make_context("g"), StepRecord::failed(std::string(kToolLoad), "CSV not found"));
  REQUIRE(ctx.error_context.has_value());
  CHECK(*ctx.error_context == "CSV not found");
  CHECK(ctx.step_history.back().outcome == StepOutcome::kFailed);
}

TEST_CASE("unregistered tools and error-less failures are rejected") {
  try {
    (void)record_step(make_context("g"), StepRecord::succeeded("train_gpt", "?"));
    FAIL("expected UnknownTool");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kUnknownTool);
  }
  StepRecord bad{std::string(kToolLoad), StepOutcome::kFailed, 0.0, "x", std::nullopt};
  CHECK_THROWS_AS((void)record_step(make_context("g"), bad), Error);
}

TEST_CASE("lessons are an append-only history") {
  auto ctx = record_lesson(make_context("g"), "malformed JSON: missing 'tool' key");
  CHECK(ctx.lessons_learned.size() == 1);
  ctx = record_lesson(std::move(ctx), "same");
  ctx = record_lesson(std::move(ctx), "same");
  CHECK(ctx.lessons_learned.size() == 3);
  CHECK_THROWS_AS((void)record_lesson(ctx, ""), Error);
}

TEST_CASE("report counts failed and succeeded steps") {
  auto ctx = make_context("g");
  ctx = record_step(std::move(ctx), StepRecord::succeeded(std::string(kToolLoad), "ok"));
  ctx = record_step(std::move(ctx), StepRecord::failed(std::string(kToolPreprocess), "boom"));
  ctx = record_step(std::move(ctx), StepRecord::succeeded(std::string(kToolPreprocess), "ok"));
  const auto r = report_from_context(ctx);
  CHECK(r.steps_succeeded == 2);
  CHECK(r.steps_total == 3);
}

TEST_CASE("timestamps render in UTC") {
  const auto t = test::reference_time();
  CHECK(iso8601(t) == "2025-11-13T21:41:21.537Z");
  CHECK(compact_timestamp(t) == "20251113_214121");
  CHECK(log_timestamp(t) == "2025-11-13 21:41:21,537");
}

TEST_CASE("ticking clock advances by its step") {
  auto clock = ticking_clock(test::reference_time(), std::chrono::milliseconds(250));
  const auto a = clock();
  const auto b = clock();
  CHECK(seconds_between(a, b) == doctest::Approx(0.25));
  const auto fixed = fixed_clock(a);
  CHECK(fixed() == fixed());
}

TEST_CASE("rng streams are reproducible and in range") {
  Rng a(42), b(42);
  for (int i = 0; i < 100; ++i) CHECK(a.next() == b.next());
  Rng r(1);
  for (int i = 0; i < 1000; ++i) {
    const double u = r.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    CHECK(r.index(7) < 7);
  }
}

}  // TEST_SUITE
