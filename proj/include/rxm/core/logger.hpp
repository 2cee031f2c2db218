#pragma once

#include <ostream>
#include <string_view>
#include <utility>

#include "rxm/core/clock.hpp"

namespace rxm {

// Line logger: "<timestamp> [LEVEL] - message". A null stream disables it.
class Logger {
 public:
  Logger() = default;
  Logger(std::ostream* out, Clock clock) : out_(out), clock_(std::move(clock)) {}

  void info(std::string_view message) const { write("INFO", message); }
  void warn(std::string_view message) const { write("WARNING", message); }
  void error(std::string_view message) const { write("ERROR", message); }

 private:
  void write(std::string_view level, std::string_view message) const {
    if (out_ == nullptr) return;
    const TimePoint now = clock_ ? clock_() : std::chrono::system_clock::now();
    *out_ << log_timestamp(now) << " [" << level << "] - " << message << '\n';
  }

  std::ostream* out_ = nullptr;
  Clock clock_;
};

}  // namespace rxm
