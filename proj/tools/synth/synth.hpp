#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace rxm::synth {

// Maintenance table in the SMMD layout: Machine_ID, seven sensor and
// operational columns, Failure_Probability and Maintenance_Priority
// (High/Medium/Low). Priority is driven by Downtime_Cost and Vibration;
// Failure_Probability by Vibration and Temperature.
std::string smmd_csv(std::size_t rows = 1430, std::uint64_t seed = 7);

struct GmrData {
  std::string csv;
  std::vector<std::size_t> outlier_rows;  // ascending
};

// 13-column production/network table in the 6GMR layout. `outliers` rows get
// Network_Latency_ms and Packet_Loss_% pushed 10 standard deviations up.
GmrData gmr_csv(std::size_t rows = 10000, std::uint64_t seed = 11, std::size_t outliers = 50);

void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace rxm::synth
