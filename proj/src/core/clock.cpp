#include "rxm/core/clock.hpp"

#include <ctime>
#include <memory>

#include <fmt/format.h>

namespace rxm {

namespace {

struct Parts {
  std::tm tm{};
  long millis = 0;
};

Parts split(TimePoint t) {
  using namespace std::chrono;
  const auto ms = duration_cast<milliseconds>(t.time_since_epoch()).count();
  long long secs = ms / 1000;
  long millis = static_cast<long>(ms % 1000);
  if (millis < 0) {
    millis += 1000;
    --secs;
  }
  const std::time_t tt = static_cast<std::time_t>(secs);
  Parts p;
  gmtime_r(&tt, &p.tm);
  p.millis = millis;
  return p;
}

}  // namespace

Clock system_clock() {
  return [] { return std::chrono::system_clock::now(); };
}

Clock fixed_clock(TimePoint at) {
  return [at] { return at; };
}

Clock ticking_clock(TimePoint start, std::chrono::milliseconds step) {
  auto next = std::make_shared<TimePoint>(start);
  return [next, step] {
    const TimePoint now = *next;
    *next += step;
    return now;
  };
}

std::string iso8601(TimePoint t) {
  const Parts p = split(t);
  return fmt::format("{:04}-{:02}-{:02}T{:02}:{:02}:{:02}.{:03}Z",
                     p.tm.tm_year + 1900, p.tm.tm_mon + 1, p.tm.tm_mday,
                     p.tm.tm_hour, p.tm.tm_min, p.tm.tm_sec, p.millis);
}

std::string compact_timestamp(TimePoint t) {
  const Parts p = split(t);
  return fmt::format("{:04}{:02}{:02}_{:02}{:02}{:02}", p.tm.tm_year + 1900,
                     p.tm.tm_mon + 1, p.tm.tm_mday, p.tm.tm_hour, p.tm.tm_min,
                     p.tm.tm_sec);
}

std::string log_timestamp(TimePoint t) {
  const Parts p = split(t);
  return fmt::format("{:04}-{:02}-{:02} {:02}:{:02}:{:02},{:03}",
                     p.tm.tm_year + 1900, p.tm.tm_mon + 1, p.tm.tm_mday,
                     p.tm.tm_hour, p.tm.tm_min, p.tm.tm_sec, p.millis);
}

double seconds_between(TimePoint from, TimePoint to) {
  return std::chrono::duration<double>(to - from).count();
}

}  // namespace rxm
