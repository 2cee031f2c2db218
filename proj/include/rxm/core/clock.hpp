#pragma once

#include <chrono>
#include <functional>
#include <string>

namespace rxm {

using TimePoint = std::chrono::system_clock::time_point;

// Injected everywhere wall time is observed so runs can be replayed.
using Clock = std::function<TimePoint()>;

Clock system_clock();

// Always returns `at`.
Clock fixed_clock(TimePoint at);

// Returns `start`, then advances by `step` on every call.
Clock ticking_clock(TimePoint start, std::chrono::milliseconds step);

// 2025-11-13T21:41:21.537Z (UTC, millisecond precision).
std::string iso8601(TimePoint t);

// 20251113_214121 (UTC).
std::string compact_timestamp(TimePoint t);

// 2025-11-13 21:41:21,537 (UTC), the log-line prefix format.
std::string log_timestamp(TimePoint t);

double seconds_between(TimePoint from, TimePoint to);

}  // namespace rxm
