#include "rxm/hitl/audit.hpp"

#include <fmt/format.h>

#include "rxm/core/error.hpp"

namespace rxm::hitl {

std::string_view to_string(Actor actor) {
  switch (actor) {
    case Actor::kOrchestrator: return "orchestrator";
    case Actor::kPerception: return "perception";
    case Actor::kPreprocessing: return "preprocessing";
    case Actor::kAnalytics: return "analytics";
    case Actor::kOptimization: return "optimization";
    case Actor::kHuman: return "human";
  }
  return "orchestrator";
}

nlohmann::json to_json(const AuditRecord& record) {
  return {{"timestamp", record.timestamp},
          {"actor", to_string(record.actor)},
          {"event", record.event},
          {"payload", record.payload}};
}

AuditLog::AuditLog(Clock clock, std::optional<std::filesystem::path> path, SinkPolicy policy)
    : clock_(std::move(clock)), path_(std::move(path)), policy_(policy) {
  if (!path_) return;
  std::error_code ec;
  if (path_->has_parent_path()) std::filesystem::create_directories(path_->parent_path(), ec);
  out_.open(*path_, std::ios::out | std::ios::app);
  if (!out_) fail(fmt::format("cannot open audit log '{}'", path_->string()));
}

void AuditLog::fail(const std::string& why) {
  if (policy_ == SinkPolicy::kFatal) throw Error(ErrorCode::kSinkUnwritable, why);
  if (!sink_failure_) sink_failure_ = why;
}

AuditRecord AuditLog::append(Actor actor, std::string event, nlohmann::json payload) {
  std::lock_guard lock(mutex_);
  TimePoint now = clock_ ? clock_() : std::chrono::system_clock::now();
  if (last_ && now < *last_) now = *last_;
  last_ = now;
  AuditRecord record{iso8601(now), actor, std::move(event), std::move(payload)};
  if (path_ && !sink_failure_) {
    out_ << to_json(record).dump() << '\n';
    out_.flush();
    if (!out_) fail(fmt::format("cannot write audit log '{}'", path_->string()));
  }
  records_.push_back(std::move(record));
  return records_.back();
}

std::vector<AuditRecord> AuditLog::records() const {
  std::lock_guard lock(mutex_);
  return records_;
}

std::size_t AuditLog::size() const {
  std::lock_guard lock(mutex_);
  return records_.size();
}

}  // namespace rxm::hitl
