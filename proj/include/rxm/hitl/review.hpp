#pragma once

#include <cstddef>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "rxm/hitl/audit.hpp"
#include "rxm/optimization/optimization.hpp"

namespace rxm::hitl {

enum class ReviewStatus { kApproved, kAdjusted, kRejected };
enum class ReviewMode { kInteractive, kAutoApprove };

std::string_view to_string(ReviewStatus status);

struct Adjustment {
  std::string machine_id;
  std::string field;  // "priority" or "action"
  std::string new_value;
};

struct ReviewOutcome {
  ReviewStatus status = ReviewStatus::kApproved;
  std::size_t actions_count = 0;
  std::size_t unique_machines = 0;
  std::vector<Adjustment> adjustments;
  bool input_aborted = false;
  // Approved or adjusted recommendations, re-ranked; empty when rejected.
  std::vector<optimization::Recommendation> approved;
};

// "approved (action=10, unique_machines=10)".
std::string describe(const ReviewOutcome& outcome);

nlohmann::json to_json(const ReviewOutcome& outcome);

// Ranked table shown to the reviewer, one numbered line per recommendation.
std::string render_table(const std::vector<optimization::Recommendation>& recs);

// Interactive mode reads commands from `in`:
//   a | approve           accept as shown
//   r | reject            withhold every recommendation
//   d | adjust            then lines "<n> priority <level>", "<n> action <text>", "done"
// A priority edit re-prices the recommendation from `actions`. Score edits
// are refused. End of input rejects the run. Every interaction is audited
// with actor "human".
ReviewOutcome review(std::vector<optimization::Recommendation> recs, std::istream& in,
                     std::ostream& out, ReviewMode mode, AuditLog& audit,
                     const optimization::ActionTable& actions = {});

}  // namespace rxm::hitl
