#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "rxm/perception/perception.hpp"
#include "rxm/preprocessing/plan.hpp"
#include "rxm/preprocessing/schema.hpp"

namespace rxm::test {

// One column case for the tool decider with the directive expected for it,
// written out by hand from the rule table.
struct DeciderCase {
  std::string label;
  bool numeric;
  double missing_pct;
  std::size_t memory_mib;
  std::size_t cardinality;  // categorical only
  bool supervised;
  preprocessing::Imputation imputation;
  preprocessing::Scaling scaling;
  preprocessing::Encoding encoding;
};

inline std::vector<DeciderCase> decider_cases() {
  using I = preprocessing::Imputation;
  using S = preprocessing::Scaling;
  using E = preprocessing::Encoding;
  return {
      {"numeric 5% missing, 50 MB", true, 0.05, 50, 0, true, I::kMedian, S::kStandard, E::kPassthrough},
      {"numeric 10% missing (lower edge), 50 MB", true, 0.10, 50, 0, true, I::kMedian, S::kStandard, E::kPassthrough},
      {"numeric 15% missing, 150 MB", true, 0.15, 150, 0, true, I::kMedian, S::kRobust, E::kPassthrough},
      {"numeric 20% missing (upper edge), 150 MB", true, 0.20, 150, 0, true, I::kMedian, S::kRobust, E::kPassthrough},
      {"numeric 25% missing, 50 MB", true, 0.25, 50, 0, true, I::kKnn, S::kStandard, E::kPassthrough},
      {"numeric 25% missing, 150 MB", true, 0.25, 150, 0, false, I::kKnn, S::kRobust, E::kPassthrough},
      {"categorical 10 levels, 5% missing", false, 0.05, 50, 10, true, I::kMostFrequent, S::kNone, E::kOneHot},
      {"categorical 50 levels, 10% missing", false, 0.10, 150, 50, false, I::kMostFrequent, S::kNone, E::kOneHot},
      {"categorical 51 levels, supervised", false, 0.15, 50, 51, true, I::kMostFrequent, S::kNone, E::kTargetEncoding},
      {"categorical 51 levels, unsupervised", false, 0.20, 50, 51, false, I::kNone, S::kNone, E::kDrop},
      {"categorical 200 levels, 25% missing, supervised", false, 0.25, 150, 200, true, I::kKnn, S::kNone, E::kTargetEncoding},
      {"categorical 200 levels, unsupervised", false, 0.05, 150, 200, false, I::kNone, S::kNone, E::kDrop},
  };
}

// Metadata and schema with a single feature column "f" carrying the case's
// traits, plus a "y" target when supervised.
struct DeciderInput {
  perception::DatasetMetadata metadata;
  preprocessing::SchemaMap schema;
};

inline DeciderInput decider_input(const DeciderCase& c) {
  const std::size_t n = 1000;
  DeciderInput in;
  in.metadata.n_rows = n;
  perception::ColumnProfile f;
  f.name = "f";
  f.inferred_dtype = c.numeric ? perception::DType::kNumeric : perception::DType::kCategorical;
  f.numeric_values = c.numeric;
  f.missing_pct = c.missing_pct;
  f.missing_count = static_cast<std::size_t>(c.missing_pct * static_cast<double>(n) + 0.5);
  f.unique_count = c.numeric ? 400 : c.cardinality;
  in.metadata.profiles.push_back(f);
  in.schema.roles.push_back({"f", c.numeric ? preprocessing::Role::kFeatureNumeric
                                            : preprocessing::Role::kFeatureCategorical});
  if (c.supervised) {
    perception::ColumnProfile y;
    y.name = "y";
    y.unique_count = 3;
    in.metadata.profiles.push_back(y);
    in.schema.roles.push_back({"y", preprocessing::Role::kTargetCandidate});
    in.schema.chosen_target = "y";
  }
  in.metadata.n_cols = in.metadata.profiles.size();
  in.metadata.estimated_memory_bytes = c.memory_mib << 20;
  return in;
}

}  // namespace rxm::test
