#include <doctest.h>

#include <cmath>

#include <fmt/format.h>

#include "rxm/core/error.hpp"
#include "rxm/core/rng.hpp"
#include "rxm/perception/perception.hpp"
#include "support.hpp"
#include "synth/synth.hpp"

using namespace rxm;
using namespace rxm::perception;

TEST_SUITE("perception") {

TEST_CASE("small CSV parses into typed columns") {
  const auto frame = parse_csv("a,b\n1,x\n2,y\n3,z\n");
  CHECK(frame.n_rows() == 3);
  CHECK(frame.n_cols() == 2);
  const auto meta = inspect(frame);
  CHECK(meta.profile("a").inferred_dtype == DType::kNumeric);
  CHECK(meta.profile("b").inferred_dtype == DType::kCategorical);
}

TEST_CASE("quoted fields, empty cells and header trimming") {
  const auto frame = parse_csv(" id ,note\n1,\"hello, world\"\n2,\"say \"\"hi\"\"\"\n3,\n");
  CHECK(frame.column_names()[0] == "id");
  CHECK(std::get<std::string>(frame.at(0, 1)) == "hello, world");
  CHECK(std::get<std::string>(frame.at(1, 1)) == "say \"hi\"");
  CHECK(is_missing(frame.at(2, 1)));
}

TEST_CASE("ragged rows name the record") {
  try {
    (void)parse_csv("a,b\n1,2\n3\n");
    FAIL("expected MalformedCsv");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kMalformedCsv);
    CHECK(std::string(e.what()).find("row 2") != std::string::npos);
  }
}

TEST_CASE("missing file reports its path") {
  try {
    (void)load_csv("/nonexistent/dir/machines.csv");
    FAIL("expected FileNotFound");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kFileNotFound);
    CHECK(std::string(e.what()).find("/nonexistent/dir/machines.csv") != std::string::npos);
  }
}

TEST_CASE("number parsing is strict") {
  CHECK(parse_number("1e3") == 1000.0);
  CHECK(parse_number(" -2.5 ") == -2.5);
  CHECK(parse_number("+4") == 4.0);
  CHECK_FALSE(parse_number("inf").has_value());
  CHECK_FALSE(parse_number("nan").has_value());
  CHECK_FALSE(parse_number("12abc").has_value());
  CHECK_FALSE(parse_number("").has_value());
}

TEST_CASE("datetime recognition") {
  CHECK(looks_like_datetime("2024-01-31"));
  CHECK(looks_like_datetime("2024/01/31 08:15"));
  CHECK(looks_like_datetime("2024-01-31T08:15:00Z"));
  CHECK(looks_like_datetime("01/31/2024"));
  CHECK_FALSE(looks_like_datetime("M001"));
  CHECK_FALSE(looks_like_datetime("31.5"));
}

TEST_CASE("numeric profile over non-missing cells") {
  const auto meta = inspect(parse_csv("v,w\n1,a\n2,b\n,c\n4,d\n"));
  const auto& p = meta.profile("v");
  CHECK(p.missing_count == 1);
  CHECK(p.missing_pct == 0.25);
  CHECK(*p.mean == doctest::Approx(7.0 / 3.0).epsilon(1e-15));
  CHECK(*p.min == 1.0);
  CHECK(*p.max == 4.0);
  CHECK(p.unique_count == 3);
  CHECK(p.uniqueness_ratio == 1.0);
}

TEST_CASE("identical values make a constant column") {
  std::string text = "m\n";
  for (int i = 0; i < 20; ++i) text += "M001\n";
  const auto meta = inspect(parse_csv(text));
  CHECK(meta.profile("m").inferred_dtype == DType::kConstant);
  CHECK(meta.profile("m").unique_count == 1);
}

TEST_CASE("empty frame is rejected") {
  CHECK_THROWS_AS((void)inspect(DatasetFrame{}), Error);
}

TEST_CASE("stray tokens in a numeric column count as missing") {
  std::string text = "v\n";
  for (int i = 0; i < 99; ++i) text += std::to_string(i) + "\n";
  text += "n/a\n";
  const auto meta = inspect(parse_csv(text));
  const auto& p = meta.profile("v");
  CHECK(p.inferred_dtype == DType::kNumeric);
  CHECK(p.parse_failure_count == 1);
  CHECK(p.missing_count == 1);
  const auto issues = flag_quality_issues(meta);
  REQUIRE(issues.size() == 1);
  CHECK(issues[0].kind == IssueKind::kParseFailures);
}

TEST_CASE("memory estimate: 8 bytes per numeric cell plus text bytes") {
  const auto meta = inspect(parse_csv("a,b,c\n1,xy,\n2,z,3\n"));
  // a and c numeric: 8 * 2 rows * 2 columns; text "xy" + "z".
  CHECK(meta.estimated_memory_bytes == 8 * 2 * 2 + 3);
}

TEST_CASE("quality issues follow the cutoffs") {
  SUBCASE("60% missing") {
    const auto meta = inspect(parse_csv("a,b\n1,1\n,2\n,3\n,4\n5,5\n,6\n7,7\n,8\n9,9\n,10\n"));
    const auto issues = flag_quality_issues(meta);
    REQUIRE(issues.size() == 1);
    CHECK(issues[0].kind == IssueKind::kHighMissingness);
    CHECK(*issues[0].column == "a");
  }
  SUBCASE("exactly 50% missing is not flagged") {
    const auto meta = inspect(parse_csv("a,b\n1,1\n,2\n3,3\n,4\n"));
    CHECK(flag_quality_issues(meta).empty());
  }
  SUBCASE("constant and duplicate rows, sorted by kind") {
    const auto meta = inspect(parse_csv("k,v\nx,1\nx,2\nx,1\n"));
    const auto issues = flag_quality_issues(meta);
    REQUIRE(issues.size() == 2);
    CHECK(issues[0].kind == IssueKind::kConstantColumn);
    CHECK(issues[1].kind == IssueKind::kDuplicateRows);
    CHECK_FALSE(issues[1].column.has_value());
  }
  SUBCASE("clean SMMD-shaped data has no issues") {
    const auto meta = inspect(parse_csv(synth::smmd_csv()));
    CHECK(meta.n_rows == 1430);
    CHECK(meta.n_cols == 10);
    CHECK(flag_quality_issues(meta).empty());
  }
}

TEST_CASE("load_csv reads a file from disk") {
  test::TempDir dir;
  test::write_file(dir / "d.csv", "a;b\n1;2\n");
  const auto frame = load_csv(dir / "d.csv", ';');
  CHECK(frame.n_cols() == 2);
  CHECK(std::get<double>(frame.at(0, 1)) == 2.0);
  CHECK_THROWS_AS((void)load_csv(dir / "d.csv", ',', false), Error);
}

TEST_CASE("6GMR-shaped frame at full size") {
  const auto data = synth::gmr_csv(100000, 11, 0);
  const auto meta = inspect(parse_csv(data.csv));
  CHECK(meta.n_rows == 100000);
  CHECK(meta.n_cols == 13);
  CHECK(meta.profile("Timestamp").inferred_dtype == DType::kDatetime);
}

TEST_CASE("property: profile invariants and two-pass statistics") {
  Rng rng(2024);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 5 + rng.index(60);
    std::string text = "x,c\n";
    std::vector<double> present;
    for (std::size_t r = 0; r < n; ++r) {
      if (rng.uniform() < 0.2) {
        text += ",";
      } else {
        const double v = std::round(rng.normal(10.0, 4.0) * 1000.0) / 1000.0;
        present.push_back(v);
        text += fmt::format("{}", v) + ",";
      }
      text += rng.uniform() < 0.1 ? "\n" : fmt::format("k{}\n", rng.index(4));
    }
    const auto frame = parse_csv(text);
    const auto meta = inspect(frame);
    CHECK(meta.profiles.size() == meta.n_cols);
    for (const auto& p : meta.profiles) {
      CHECK(p.missing_count + p.non_missing_count(n) == n);
      CHECK(p.missing_pct == static_cast<double>(p.missing_count) / static_cast<double>(n));
      if (p.inferred_dtype == DType::kConstant) CHECK(p.unique_count <= 1);
    }
    CHECK(meta == inspect(frame));
    for (std::size_t r = 0; r < meta.preview.size(); ++r) {
      for (std::size_t c = 0; c < frame.n_cols(); ++c) CHECK(meta.preview[r][c] == frame.at(r, c));
    }
    const auto& px = meta.profile("x");
    if (present.size() >= 2 && px.mean) {
      double sum = 0.0;
      for (double v : present) sum += v;
      const double mean = sum / static_cast<double>(present.size());
      double ss = 0.0;
      for (double v : present) ss += (v - mean) * (v - mean);
      const double sd = std::sqrt(ss / static_cast<double>(present.size()));
      CHECK(std::abs(*px.mean - mean) <= 1e-12 * std::max(1.0, std::abs(mean)));
      CHECK(std::abs(*px.std - sd) <= 1e-12 * std::max(1.0, sd));
    }
  }
}

}  // TEST_SUITE
