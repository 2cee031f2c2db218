#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>

#include <fmt/format.h>

#include "decider_fixture.hpp"
#include "rxm/core/error.hpp"
#include "rxm/core/rng.hpp"
#include "rxm/perception/perception.hpp"
#include "rxm/preprocessing/features.hpp"
#include "rxm/preprocessing/pipeline.hpp"
#include "rxm/preprocessing/plan.hpp"
#include "rxm/preprocessing/schema.hpp"
#include "synth/synth.hpp"

using namespace rxm;
using namespace rxm::perception;
using namespace rxm::preprocessing;

namespace {

struct Loaded {
  DatasetFrame frame;
  DatasetMetadata metadata;
};

Loaded load(const std::string& csv) {
  Loaded l{parse_csv(csv), {}};
  l.metadata = inspect(l.frame);
  return l;
}

// Textbook plug-in MI written independently: explicit contingency table,
// p(a,b) log(p(a,b) / (p(a) p(b))).
double brute_mi(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
  const std::size_t ka = *std::max_element(a.begin(), a.end()) + 1;
  const std::size_t kb = *std::max_element(b.begin(), b.end()) + 1;
  std::vector<std::vector<double>> table(ka, std::vector<double>(kb, 0.0));
  for (std::size_t i = 0; i < a.size(); ++i) table[a[i]][b[i]] += 1.0;
  const double n = static_cast<double>(a.size());
  double mi = 0.0;
  for (std::size_t i = 0; i < ka; ++i) {
    double pa = 0.0;
    for (std::size_t j = 0; j < kb; ++j) pa += table[i][j] / n;
    for (std::size_t j = 0; j < kb; ++j) {
      double pb = 0.0;
      for (std::size_t r = 0; r < ka; ++r) pb += table[r][j] / n;
      const double pab = table[i][j] / n;
      if (pab > 0.0) mi += pab * std::log(pab / (pa * pb));
    }
  }
  return mi;
}

// Equal-frequency bins from sorted order statistics, written independently.
std::vector<std::size_t> brute_bins(const std::vector<double>& v, std::size_t bins) {
  std::vector<double> sorted = v;
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> cuts;
  for (std::size_t k = 1; k < bins; ++k) cuts.push_back(sorted[k * sorted.size() / bins]);
  std::vector<std::size_t> out;
  for (double x : v) {
    std::size_t c = 0;
    for (double cut : cuts) c += cut <= x ? 1 : 0;
    out.push_back(c);
  }
  return out;
}

}  // namespace

TEST_SUITE("preprocessing") {

TEST_CASE("schema: names, uniqueness and parseability") {
  std::string csv = "Machine_ID,recorded,Maintenance_Priority,Downtime_Cost,Vibration,zone\n";
  for (int i = 0; i < 40; ++i) {
    csv += fmt::format("M{:03d},2024-01-{:02d},{},{}.5,{}.25,{}\n", i, i % 28 + 1,
                       i % 3 == 0 ? "High" : i % 3 == 1 ? "Medium" : "Low", 100 + i, i % 7, "abc"[i % 3]);
  }
  const auto l = load(csv);
  const auto s = discover_schema(l.frame, l.metadata);
  CHECK(s.role("Machine_ID") == Role::kIdentifier);
  CHECK(s.role("recorded") == Role::kTimestamp);
  CHECK(s.role("Maintenance_Priority") == Role::kTargetCandidate);
  CHECK(s.role("Downtime_Cost") == Role::kFeatureNumeric);
  CHECK(s.role("Vibration") == Role::kFeatureNumeric);
  CHECK(s.role("zone") == Role::kFeatureCategorical);
  REQUIRE(s.chosen_target.has_value());
  CHECK(*s.chosen_target == "Maintenance_Priority");
  CHECK(s.roles.size() == l.frame.n_cols());
  for (const auto& [name, role] : s.roles) CHECK(s.evidence.count(name) == 1);
}

TEST_CASE("schema: unique text column without an identifier name") {
  std::string csv = "serialish,v\n";
  for (int i = 0; i < 30; ++i) csv += fmt::format("unit-{},{}\n", i, i % 4);
  const auto l = load(csv);
  CHECK(discover_schema(l.frame, l.metadata).role("serialish") == Role::kIdentifier);
}

TEST_CASE("schema: several target names") {
  const auto l = load("Efficiency_Status,Failure_Probability,x\nHigh,0.1,1\nLow,0.2,2\nHigh,0.3,3\n");
  try {
    (void)discover_schema(l.frame, l.metadata);
    FAIL("expected AmbiguousTarget");
  } catch (const AmbiguousTargetError& e) {
    CHECK(e.code() == ErrorCode::kAmbiguousTarget);
    CHECK(e.candidates() == std::vector<std::string>{"Efficiency_Status", "Failure_Probability"});
  }
  SchemaOptions pick;
  pick.on_ambiguous = AmbiguityPolicy::kPickLast;
  CHECK(*discover_schema(l.frame, l.metadata, pick).chosen_target == "Failure_Probability");
  SchemaOptions hint;
  hint.target_hint = "Efficiency_Status";
  const auto s = discover_schema(l.frame, l.metadata, hint);
  CHECK(*s.chosen_target == "Efficiency_Status");
  CHECK(s.role(*s.chosen_target) == Role::kTargetCandidate);
  hint.target_hint = "nope";
  CHECK_THROWS_AS((void)discover_schema(l.frame, l.metadata, hint), Error);

  const auto demoted = demote_targets(s, l.metadata);
  CHECK_FALSE(demoted.chosen_target.has_value());
  CHECK(demoted.role("Efficiency_Status") == Role::kFeatureCategorical);
  CHECK(demoted.role("Failure_Probability") == Role::kFeatureNumeric);
}

TEST_CASE("schema: synthetic SMMD layout has seven features") {
  const auto l = load(synth::smmd_csv());
  SchemaOptions o;
  o.on_ambiguous = AmbiguityPolicy::kPickLast;
  const auto s = discover_schema(l.frame, l.metadata, o);
  CHECK(s.feature_columns().size() == 7);
  CHECK(*s.chosen_target == "Maintenance_Priority");
  CHECK(s.role("Downtime_Cost") == Role::kFeatureNumeric);
}

TEST_CASE("pearson and redundancy removal") {
  std::string csv = "a,b,c,status\n";
  Rng rng(3);
  for (int i = 0; i < 200; ++i) {
    const double a = rng.normal();
    csv += fmt::format("{},{},{},{}\n", a, a, rng.normal(), a > 0 ? "H" : "L");
  }
  const auto l = load(csv);
  const auto s = discover_schema(l.frame, l.metadata);
  const auto report = analyze_features(l.frame, l.metadata, s);
  CHECK(*report.correlation("a", "b") == doctest::Approx(1.0));
  REQUIRE(report.removed.size() == 1);
  CHECK(report.removed[0].column == "b");  // equal MI: the later column goes
  CHECK(report.removed[0].reason == RemovalReason::kRedundant);
  CHECK(report.kept == std::vector<std::string>{"a", "c"});
  REQUIRE(report.importances.has_value());
  double total = 0.0;
  for (const auto& [k, v] : *report.importances) total += v;
  CHECK(total == doctest::Approx(1.0));
}

TEST_CASE("pearson edge cases") {
  using V = std::vector<std::optional<double>>;
  CHECK_FALSE(pearson(V{1.0}, V{2.0}).has_value());
  CHECK_FALSE(pearson(V{1.0, 1.0, 1.0}, V{1.0, 2.0, 3.0}).has_value());
  CHECK(*pearson(V{1.0, 2.0, std::nullopt, 3.0}, V{3.0, 2.0, 9.0, 1.0}) == doctest::Approx(-1.0));
}

TEST_CASE("mutual information matches a brute-force contingency table") {
  Rng rng(99);
  std::vector<std::optional<double>> x, y;
  std::vector<double> xv, yv;
  for (int i = 0; i < 1000; ++i) {
    const double a = rng.normal();
    const double b = a + rng.normal(0.0, 0.7);
    x.push_back(a);
    y.push_back(b);
    xv.push_back(a);
    yv.push_back(b);
  }
  const auto bx = equal_frequency_bins(x, 10);
  const auto by = equal_frequency_bins(y, 10);
  const auto ox = brute_bins(xv, 10);
  const auto oy = brute_bins(yv, 10);
  for (std::size_t i = 0; i < ox.size(); ++i) CHECK(*bx[i] == ox[i]);
  CHECK(plugin_mutual_information(bx, by) == doctest::Approx(brute_mi(ox, oy)).epsilon(1e-12));
  CHECK(plugin_mutual_information(bx, by) > 0.3);
}

TEST_CASE("independent feature carries almost no information") {
  Rng rng(5);
  std::vector<std::optional<double>> x;
  std::vector<std::optional<std::size_t>> y;
  for (int i = 0; i < 10000; ++i) {
    x.push_back(rng.uniform());
    y.push_back(rng.index(3));
  }
  const double mi = plugin_mutual_information(equal_frequency_bins(x, 10), y);
  CHECK(mi >= 0.0);
  CHECK(mi <= 0.05);
}

TEST_CASE("clean five-feature frame keeps everything") {
  std::string csv = "Machine_ID,Temperature,Vibration,Pressure,Acoustic_Level,Downtime_Cost,Maintenance_Priority\n";
  Rng rng(8);
  for (int i = 0; i < 300; ++i) {
    csv += fmt::format("M{:03d},{:.2f},{:.3f},{:.2f},{:.2f},{:.2f},{}\n", i % 50, rng.normal(70, 5), rng.normal(3, 1),
                       rng.normal(100, 10), rng.normal(60, 6), rng.uniform(500, 5000),
                       "HML"[rng.index(3)] == 'H' ? "High" : "Low");
  }
  const auto l = load(csv);
  const auto s = discover_schema(l.frame, l.metadata);
  const auto report = analyze_features(l.frame, l.metadata, s);
  CHECK(report.kept.size() == 5);
  CHECK(report.removed.empty());
}

TEST_CASE("constant and unencodable columns are removed") {
  std::string csv = "k,code,v\n";
  for (int i = 0; i < 120; ++i) csv += fmt::format("same,c{},{}\n", i % 60, i * 0.5);
  const auto l = load(csv);
  SchemaOptions o;
  o.identifier_uniqueness = 2.0;  // keep "code" a feature
  const auto s = discover_schema(l.frame, l.metadata, o);
  const auto report = analyze_features(l.frame, l.metadata, s);
  CHECK(report.is_removed("k"));
  CHECK(report.is_removed("code"));
  CHECK(report.kept == std::vector<std::string>{"v"});
  std::set<std::string> all(report.kept.begin(), report.kept.end());
  for (const auto& r : report.removed) CHECK(all.insert(r.column).second);
  CHECK(all.size() == s.feature_columns().size());
}

TEST_CASE("no features is an error") {
  const auto l = load("Machine_ID,status\nM1,a\nM2,b\n");
  const auto s = discover_schema(l.frame, l.metadata);
  CHECK_THROWS_AS((void)analyze_features(l.frame, l.metadata, s), Error);
}

TEST_CASE("tool decider rule table") {
  for (const auto& c : test::decider_cases()) {
    CAPTURE(c.label);
    const auto in = test::decider_input(c);
    const auto plan = decide_tools(in.metadata, in.schema);
    REQUIRE(plan.directives.size() == 1);
    const auto& d = plan.directives[0];
    CHECK(d.imputation == c.imputation);
    CHECK(d.scaling == c.scaling);
    CHECK(d.encoding == c.encoding);
    CHECK_FALSE(d.rationale.empty());
    CHECK(plan == decide_tools(in.metadata, in.schema));
    CHECK(plan.find("y") == nullptr);
  }
}

TEST_CASE("backup plan is conservative") {
  auto c = test::decider_cases()[5];  // numeric, 25% missing, 150 MB
  auto in = test::decider_input(c);
  auto d = backup_plan(in.metadata, in.schema).directives[0];
  CHECK(d.imputation == Imputation::kMedian);
  CHECK(d.scaling == Scaling::kStandard);
  c = test::decider_cases()[8];  // 51 levels, supervised
  in = test::decider_input(c);
  d = backup_plan(in.metadata, in.schema).directives[0];
  CHECK(d.encoding == Encoding::kDrop);
  CHECK(backup_plan(in.metadata, in.schema).backup);
}

TEST_CASE("identifiers pass through and the target has no directive") {
  const auto l = load("Machine_ID,x,status\nM1,1,a\nM2,2,b\nM3,3,a\n");
  const auto s = discover_schema(l.frame, l.metadata);
  const auto plan = decide_tools(l.metadata, s);
  CHECK(plan.find("status") == nullptr);
  const auto* id = plan.find("Machine_ID");
  REQUIRE(id != nullptr);
  CHECK(id->encoding == Encoding::kPassthrough);
  CHECK(id->scaling == Scaling::kNone);
  CHECK(id->imputation == Imputation::kNone);
}

TEST_CASE("quantiles and modes") {
  const std::vector<double> v{1, 2, 3, 4};
  CHECK(quantile_sorted(v, 0.25) == 1.75);
  CHECK(quantile_sorted(v, 0.5) == 2.5);
  CHECK(quantile_sorted(v, 0.75) == 3.25);
  CHECK(median_of({3, 1, 2}) == 2.0);
  CHECK(mode_of({"b", "a", "b", "a", "c"}) == "a");
}

TEST_CASE("standard scaling of [1,2,3]") {
  const auto l = load("x,y\n1,5.5\n2,6.5\n3,7.5\n");
  SchemaOptions o;
  o.identifier_uniqueness = 2.0;
  o.target_hint = "y";
  const auto s = discover_schema(l.frame, l.metadata, o);
  const auto plan = decide_tools(l.metadata, s);
  const std::vector<std::size_t> rows{0, 1, 2};
  const auto fp = fit_pipeline(l.frame, plan, s, rows);
  const auto* col = fp.find("x");
  CHECK(col->center == 2.0);
  CHECK(col->spread == doctest::Approx(std::sqrt(2.0 / 3.0)).epsilon(1e-15));
}

TEST_CASE("one-hot vocabulary is sorted and unseen categories are zero") {
  const auto l = load("c,v,y\nb,1.5,0\na,2.5,1\nb,3.5,0\nz,4.5,1\n");
  SchemaOptions o;
  o.target_hint = "y";
  const auto s = discover_schema(l.frame, l.metadata, o);
  const auto plan = decide_tools(l.metadata, s);
  const std::vector<std::size_t> train{0, 1, 2};
  const auto fp = fit_pipeline(l.frame, plan, s, train);
  CHECK(fp.find("c")->vocabulary == std::vector<std::string>{"a", "b"});
  CHECK(fp.find("c")->output_names == std::vector<std::string>{"c=a", "c=b"});
  const std::vector<std::size_t> test_rows{3};
  const auto out = apply_pipeline(fp, l.frame, test_rows);
  CHECK(out.features.cols() == 3);
  CHECK(out.features(0, 0) == 0.0);
  CHECK(out.features(0, 1) == 0.0);
}

TEST_CASE("target encoding uses training target means") {
  // Continuous target: category X gets {1, 3, ...}; the oracle is a plain mean.
  std::string csv = "c,v,y\n";
  std::map<std::string, std::pair<double, int>> sums;
  double total = 0.0;
  const std::size_t n_train = 40;
  for (std::size_t i = 0; i < n_train; ++i) {
    const std::string cat = i % 2 == 0 ? "X" : "Y";
    const double y = cat == "X" ? (i % 4 == 0 ? 1.0 : 3.0) + 0.001 * i : 10.0 + 0.37 * i;
    csv += fmt::format("{},{}.5,{}\n", cat, i % 5, y);
    sums[cat].first += y;
    sums[cat].second += 1;
    total += y;
  }
  csv += "Q,1.5,7.0\n";
  const auto l = load(csv);
  SchemaOptions o;
  o.target_hint = "y";
  const auto s = discover_schema(l.frame, l.metadata, o);
  PreprocessPlan plan = decide_tools(l.metadata, s);
  for (auto& d : plan.directives) {
    if (d.column == "c") d.encoding = Encoding::kTargetEncoding;
  }
  std::vector<std::size_t> train(n_train);
  std::iota(train.begin(), train.end(), 0);
  const auto fp = fit_pipeline(l.frame, plan, s, train);
  REQUIRE_FALSE(fp.target_discrete);
  const auto* c = fp.find("c");
  CHECK(c->target_means.at("X") == doctest::Approx(sums["X"].first / sums["X"].second).epsilon(1e-12));
  CHECK(c->target_means.at("Y") == doctest::Approx(sums["Y"].first / sums["Y"].second).epsilon(1e-12));
  CHECK(c->global_target_mean == doctest::Approx(total / n_train).epsilon(1e-12));
  const std::vector<std::size_t> test_rows{n_train};
  const auto out = apply_pipeline(fp, l.frame, test_rows);
  const auto col = std::find(out.feature_names.begin(), out.feature_names.end(), "c") - out.feature_names.begin();
  CHECK(out.features(0, col) == doctest::Approx(total / n_train).epsilon(1e-12));
}

TEST_CASE("target encoding of [1, 3] is 2") {
  std::string csv = "c,v,y\nX,0.5,1.0\nX,1.5,3.0\n";
  for (int i = 0; i < 30; ++i) csv += fmt::format("Z{},{}.5,{}\n", i % 3, i % 4, 20.0 + i);
  const auto l = load(csv);
  SchemaOptions o;
  o.target_hint = "y";
  const auto s = discover_schema(l.frame, l.metadata, o);
  PreprocessPlan plan = decide_tools(l.metadata, s);
  for (auto& d : plan.directives) {
    if (d.column == "c") d.encoding = Encoding::kTargetEncoding;
  }
  std::vector<std::size_t> train(32);
  std::iota(train.begin(), train.end(), 0);
  CHECK(fit_pipeline(l.frame, plan, s, train).find("c")->target_means.at("X") == 2.0);
}

TEST_CASE("missing test cell: impute with the train median, then scale") {
  // Train x = {1, 2, 3}: median 2, mean 2. Row 3 is missing.
  const auto l = load("x,y\n1,a\n2,b\n3,a\n,b\n");
  SchemaOptions o;
  o.identifier_uniqueness = 2.0;
  o.target_hint = "y";
  const auto s = discover_schema(l.frame, l.metadata, o);
  const auto plan = decide_tools(l.metadata, s);
  CHECK(plan.find("x")->imputation == Imputation::kKnn);  // 25% missing overall
  PreprocessPlan median_plan = plan;
  for (auto& d : median_plan.directives) d.imputation = Imputation::kMedian;
  const std::vector<std::size_t> train{0, 1, 2};
  const auto fp = fit_pipeline(l.frame, median_plan, s, train);
  const std::vector<std::size_t> test_rows{3};
  const auto out = apply_pipeline(fp, l.frame, test_rows);
  CHECK(out.features(0, 0) == 0.0);
  REQUIRE(out.target.has_value());
  CHECK(std::get<std::string>((*out.target)[0]) == "b");
}

TEST_CASE("identifiers are emitted verbatim, never as features") {
  const auto l = load("Machine_ID,x,status\nM004,1.5,a\nM007,2.5,b\nM003,3.5,a\n");
  const auto s = discover_schema(l.frame, l.metadata);
  const auto plan = decide_tools(l.metadata, s);
  const std::vector<std::size_t> rows{0, 1, 2};
  const auto fp = fit_pipeline(l.frame, plan, s, rows);
  const auto out = apply_pipeline(fp, l.frame, rows);
  CHECK(out.machine_ids() == std::vector<std::string>{"M004", "M007", "M003"});
  CHECK(out.feature_names == std::vector<std::string>{"x"});
}

TEST_CASE("knn imputation averages the three nearest training rows") {
  // d is the distance column; x is imputed. Query row: d = 10.
  const auto l = load("d,x,y\n1,100,a\n9,1,b\n10,2,a\n11,3,b\n30,500,a\n10,,b\n,,a\n,,b\n");
  SchemaOptions o;
  o.identifier_uniqueness = 2.0;
  o.target_hint = "y";
  const auto s = discover_schema(l.frame, l.metadata, o);
  const auto plan = decide_tools(l.metadata, s);
  REQUIRE(plan.find("x")->imputation == Imputation::kKnn);
  const std::vector<std::size_t> train{0, 1, 2, 3, 4};
  const auto fp = fit_pipeline(l.frame, plan, s, train);
  REQUIRE(fp.knn.has_value());
  CHECK(fp.knn->scaled.rows() == 5);
  const std::vector<std::size_t> query{5};
  const auto out = apply_pipeline(fp, l.frame, query);
  const auto* x = fp.find("x");
  // Imputed raw value mean(1, 2, 3) = 2, then standard-scaled.
  CHECK(out.features(0, 1) == doctest::Approx((2.0 - x->center) / x->spread).epsilon(1e-12));
}

TEST_CASE("bad inputs") {
  const auto l = load("x,y\n1,a\n2,b\n");
  SchemaOptions o;
  o.target_hint = "y";
  const auto s = discover_schema(l.frame, l.metadata, o);
  const auto plan = decide_tools(l.metadata, s);
  CHECK_THROWS_AS((void)fit_pipeline(l.frame, plan, s, {}), Error);
  const std::vector<std::size_t> rows{0, 1};
  const auto fp = fit_pipeline(l.frame, plan, s, rows);
  const auto other = load("z,y\n1,a\n");
  const std::vector<std::size_t> one{0};
  try {
    (void)apply_pipeline(fp, other.frame, one);
    FAIL("expected MissingColumn");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kMissingColumn);
  }
}

TEST_CASE("plan serializes one object per column") {
  const auto l = load("Machine_ID,x,c,y\nM1,1,a,p\nM2,2,b,q\nM3,3,a,p\n");
  SchemaOptions o;
  o.target_hint = "y";
  const auto s = discover_schema(l.frame, l.metadata, o);
  const auto plan = decide_tools(l.metadata, s);
  const std::vector<std::size_t> rows{0, 1, 2};
  const auto fp = fit_pipeline(l.frame, plan, s, rows);
  const auto j = to_json(plan, &fp);
  for (const char* col : {"Machine_ID", "x", "c"}) {
    REQUIRE(j.contains(col));
    for (const char* key : {"role", "imputation", "scaling", "encoding", "rationale", "fitted"}) {
      CHECK(j[col].contains(key));
    }
  }
  CHECK_FALSE(j.contains("y"));
}

TEST_CASE("property: fitted statistics come from training rows only") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    CAPTURE(seed);
    Rng rng(seed);
    std::string csv = "num,cat,status\n";
    for (int i = 0; i < 200; ++i) {
      const std::string num = rng.uniform() < 0.05 ? "" : fmt::format("{:.6f}", rng.normal(50, 10));
      const std::string cat = rng.uniform() < 0.05 ? "" : std::string(1, "pqrstu"[rng.index(6)]);
      csv += fmt::format("{},{},{}\n", num, cat, rng.uniform() < 0.5 ? "ok" : "bad");
    }
    const auto l = load(csv);
    const auto s = discover_schema(l.frame, l.metadata);
    const auto plan = decide_tools(l.metadata, s);
    std::vector<std::size_t> all(200);
    std::iota(all.begin(), all.end(), 0);
    rng.shuffle(std::span<std::size_t>(all));
    const std::vector<std::size_t> train(all.begin(), all.begin() + 150);
    const std::vector<std::size_t> test_rows(all.begin() + 150, all.end());
    const auto fp = fit_pipeline(l.frame, plan, s, train);

    std::vector<double> nums;
    std::vector<std::string> cats;
    for (std::size_t r : train) {
      if (const auto v = numeric_value(l.frame.column("num")[r])) nums.push_back(*v);
      if (const auto* c = std::get_if<std::string>(&l.frame.column("cat")[r])) cats.push_back(*c);
    }
    double mean = 0.0;
    for (double v : nums) mean += v;
    mean /= static_cast<double>(nums.size());
    double ss = 0.0;
    for (double v : nums) ss += (v - mean) * (v - mean);
    const double sd = std::sqrt(ss / static_cast<double>(nums.size()));
    std::vector<double> sorted = nums;
    std::sort(sorted.begin(), sorted.end());
    const std::size_t m = sorted.size();
    const double median = m % 2 == 1 ? sorted[m / 2] : 0.5 * (sorted[m / 2 - 1] + sorted[m / 2]);
    std::map<std::string, int> counts;
    for (const auto& c : cats) ++counts[c];
    std::string mode;
    int best = 0;
    for (const auto& [k, v] : counts) {
      if (v > best) {
        best = v;
        mode = k;
      }
    }
    std::vector<std::string> vocab;
    for (const auto& [k, v] : counts) vocab.push_back(k);

    const auto* num = fp.find("num");
    const auto* cat = fp.find("cat");
    CHECK(num->median == median);
    CHECK(num->center == doctest::Approx(mean).epsilon(1e-12));
    CHECK(num->spread == doctest::Approx(sd).epsilon(1e-12));
    CHECK(cat->mode == mode);
    CHECK(cat->vocabulary == vocab);
    CHECK(fp.train_rows == 150);

    const auto out = apply_pipeline(fp, l.frame, test_rows);
    CHECK(out.features.rows() == 50);
    CHECK(out.features.allFinite());
    for (const auto& name : out.feature_names) CHECK(name.rfind("status", 0) != 0);
  }
}

}  // TEST_SUITE
