#pragma once

#include <filesystem>
#include <fstream>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "rxm/core/clock.hpp"

namespace rxm::hitl {

enum class Actor { kOrchestrator, kPerception, kPreprocessing, kAnalytics, kOptimization, kHuman };

std::string_view to_string(Actor actor);

struct AuditRecord {
  std::string timestamp;  // ISO-8601
  Actor actor = Actor::kOrchestrator;
  std::string event;
  nlohmann::json payload;
};

nlohmann::json to_json(const AuditRecord& record);

// What happens when the file sink cannot be opened or written.
enum class SinkPolicy {
  kFatal,         // throw Error(kSinkUnwritable)
  kWarnAndKeep,   // keep records in memory and remember the failure
};

// Append-only JSON-Lines audit stream. Every record is kept in memory and,
// when a path is given, appended to the file and flushed immediately.
// Timestamps are clamped so they never decrease within one log.
class AuditLog {
 public:
  explicit AuditLog(Clock clock, std::optional<std::filesystem::path> path = std::nullopt,
                    SinkPolicy policy = SinkPolicy::kFatal);
  AuditLog(const AuditLog&) = delete;
  AuditLog& operator=(const AuditLog&) = delete;

  AuditRecord append(Actor actor, std::string event, nlohmann::json payload = nullptr);

  std::vector<AuditRecord> records() const;
  std::size_t size() const;
  const std::optional<std::filesystem::path>& path() const { return path_; }
  // Set once a write failed under kWarnAndKeep.
  const std::optional<std::string>& sink_failure() const { return sink_failure_; }

 private:
  void fail(const std::string& why);

  mutable std::mutex mutex_;
  Clock clock_;
  std::optional<std::filesystem::path> path_;
  SinkPolicy policy_;
  std::ofstream out_;
  std::vector<AuditRecord> records_;
  std::optional<TimePoint> last_;
  std::optional<std::string> sink_failure_;
};

}  // namespace rxm::hitl
