#include "rxm/hitl/review.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include <fmt/format.h>

namespace rxm::hitl {

using optimization::Recommendation;

std::string_view to_string(ReviewStatus status) {
  switch (status) {
    case ReviewStatus::kApproved: return "approved";
    case ReviewStatus::kAdjusted: return "adjusted";
    case ReviewStatus::kRejected: return "rejected";
  }
  return "rejected";
}

std::string describe(const ReviewOutcome& outcome) {
  return fmt::format("{} (action={}, unique_machines={})", to_string(outcome.status),
                     outcome.actions_count, outcome.unique_machines);
}

nlohmann::json to_json(const ReviewOutcome& outcome) {
  nlohmann::json adjustments = nlohmann::json::array();
  for (const auto& a : outcome.adjustments) {
    adjustments.push_back({{"machine_id", a.machine_id}, {"field", a.field}, {"new_value", a.new_value}});
  }
  return {{"status", to_string(outcome.status)},
          {"actions_count", outcome.actions_count},
          {"unique_machines", outcome.unique_machines},
          {"adjustments", adjustments},
          {"input_aborted", outcome.input_aborted}};
}

std::string render_table(const std::vector<Recommendation>& recs) {
  std::string out = fmt::format("{:>3}  {:<12} {:<9} {:>9} {:>8} {:>6}  {}\n", "#", "machine",
                                "priority", "score", "cost", "hours", "action");
  for (std::size_t i = 0; i < recs.size(); ++i) {
    const auto& r = recs[i];
    std::string features;
    for (const auto& f : r.contributing_features) {
      features += fmt::format("{}{}={:.3f}", features.empty() ? "" : ", ", f.feature, f.weight);
    }
    out += fmt::format("{:>3}  {:<12} {:<9} {:>9.4f} {:>8.0f} {:>6.1f}  {}{}\n", i + 1, r.machine_id,
                       optimization::to_string(r.priority), r.priority_score, r.cost_estimate,
                       r.time_estimate, r.action, r.advisory ? " [advisory]" : "");
    if (!features.empty()) out += fmt::format("     drivers: {}\n", features);
  }
  if (recs.empty()) out += "     (no recommendations)\n";
  return out;
}

namespace {

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

ReviewOutcome finish(std::vector<Recommendation> recs, ReviewStatus status,
                     std::vector<Adjustment> adjustments, bool aborted, AuditLog& audit) {
  ReviewOutcome o;
  o.status = status;
  o.actions_count = recs.size();
  std::set<std::string> machines;
  for (const auto& r : recs) machines.insert(r.machine_id);
  o.unique_machines = machines.size();
  o.adjustments = std::move(adjustments);
  o.input_aborted = aborted;
  if (status != ReviewStatus::kRejected) {
    optimization::rank(recs);
    o.approved = std::move(recs);
  }
  audit.append(Actor::kHuman, "review_outcome", to_json(o));
  return o;
}

bool read_line(std::istream& in, std::string& line) {
  if (!std::getline(in, line)) return false;
  line = trim(line);
  return true;
}

}  // namespace

ReviewOutcome review(std::vector<Recommendation> recs, std::istream& in, std::ostream& out,
                     ReviewMode mode, AuditLog& audit, const optimization::ActionTable& actions) {
  if (mode == ReviewMode::kAutoApprove) {
    return finish(std::move(recs), ReviewStatus::kApproved, {}, false, audit);
  }
  out << render_table(recs);
  std::string line;
  while (true) {
    out << "Review recommendations: [a]pprove / [d]just / [r]eject > " << std::flush;
    if (!read_line(in, line)) {
      audit.append(Actor::kHuman, "input_aborted", {{"stage", "decision"}});
      return finish(std::move(recs), ReviewStatus::kRejected, {}, true, audit);
    }
    const std::string cmd = lower(line);
    audit.append(Actor::kHuman, "review_command", {{"input", line}});
    if (cmd == "a" || cmd == "approve") {
      return finish(std::move(recs), ReviewStatus::kApproved, {}, false, audit);
    }
    if (cmd == "r" || cmd == "reject") {
      return finish(std::move(recs), ReviewStatus::kRejected, {}, false, audit);
    }
    if (cmd == "d" || cmd == "adjust") break;
    out << "Unrecognized choice '" << line << "'.\n";
  }

  std::vector<Adjustment> adjustments;
  while (true) {
    out << "Adjust: \"<n> priority <Critical|Elevated|Routine>\", \"<n> action <text>\", or \"done\" > "
        << std::flush;
    if (!read_line(in, line)) {
      audit.append(Actor::kHuman, "input_aborted", {{"stage", "adjust"}});
      return finish(std::move(recs), ReviewStatus::kRejected, std::move(adjustments), true, audit);
    }
    if (lower(line) == "done") {
      const auto status = adjustments.empty() ? ReviewStatus::kApproved : ReviewStatus::kAdjusted;
      return finish(std::move(recs), status, std::move(adjustments), false, audit);
    }
    std::istringstream words(line);
    std::size_t index = 0;
    std::string field;
    if (!(words >> index >> field) || index == 0 || index > recs.size()) {
      out << "Expected a recommendation number between 1 and " << recs.size() << ".\n";
      audit.append(Actor::kHuman, "adjustment_invalid", {{"input", line}});
      continue;
    }
    std::string value;
    std::getline(words, value);
    value = trim(value);
    field = lower(field);
    Recommendation& rec = recs[index - 1];
    if (field == "score" || field == "priority_score") {
      out << "Scores are computed from the model output and the training statistics; "
             "edit the priority or the action instead.\n";
      audit.append(Actor::kHuman, "score_edit_refused",
                   {{"machine_id", rec.machine_id}, {"input", line}});
      continue;
    }
    if (field == "priority") {
      const auto p = optimization::parse_priority(value);
      if (!p) {
        out << "Unknown priority '" << value << "'.\n";
        audit.append(Actor::kHuman, "adjustment_invalid", {{"input", line}});
        continue;
      }
      rec.priority = *p;
      const auto& entry = actions.at(*p);
      rec.action = entry.action;
      rec.cost_estimate = entry.cost;
      rec.time_estimate = entry.hours;
      value = std::string(optimization::to_string(*p));
    } else if (field == "action") {
      if (value.empty()) {
        out << "Action text may not be empty.\n";
        audit.append(Actor::kHuman, "adjustment_invalid", {{"input", line}});
        continue;
      }
      rec.action = value;
    } else {
      out << "Only priority and action can be edited.\n";
      audit.append(Actor::kHuman, "adjustment_invalid", {{"input", line}});
      continue;
    }
    adjustments.push_back({rec.machine_id, field, value});
    audit.append(Actor::kHuman, "adjustment",
                 {{"machine_id", rec.machine_id}, {"field", field}, {"new_value", value}});
  }
}

}  // namespace rxm::hitl
