#pragma once

#include <sstream>
#include <string>
#include <vector>

#include "rxm/core/clock.hpp"
#include "rxm/orchestration/runner.hpp"
#include "support.hpp"
#include "synth/synth.hpp"

namespace rxm::test {

// The five canonical decisions as a planner model would send them.
inline std::vector<std::string> canonical_replies() {
  return {
      R"({"tool": "load_and_inspect_data", "finish": false, "reason": "The first step in any data analysis workflow is to load the dataset"})",
      R"({"tool": "preprocess_data", "finish": false, "reason": "Before analysis, the data must be prepared"})",
      R"({"tool": "analyze_data", "finish": false, "reason": "Train and evaluate models"})",
      R"({"tool": "generate_recommendations", "finish": false, "reason": "Turn predictions into actions"})",
      R"({"tool": "summarize", "finish": true, "reason": "Review and summarize"})",
  };
}

struct RunHarness {
  TempDir dir;
  std::istringstream in;
  std::ostringstream out;
  std::ostringstream log;

  explicit RunHarness(std::string input = {}) : in(std::move(input)) {}

  orchestration::RunConfig smmd_config(std::size_t rows = 1430) {
    const auto csv = dir / "smmd.csv";
    if (!std::filesystem::exists(csv)) synth::write_text(csv, synth::smmd_csv(rows));
    orchestration::RunConfig c;
    c.data_path = csv;
    c.auto_approve = true;
    c.log_dir = dir / "logs";
    return c;
  }

  orchestration::RunIo io() {
    return {&in, &out, &log, ticking_clock(reference_time(), std::chrono::milliseconds(1))};
  }
};

}  // namespace rxm::test
