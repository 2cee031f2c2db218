#include "synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include <fmt/format.h>

#include "rxm/core/error.hpp"
#include "rxm/core/rng.hpp"

namespace rxm::synth {

std::string smmd_csv(std::size_t rows, std::uint64_t seed) {
  Rng rng(seed);
  std::string out =
      "Machine_ID,Temperature,Vibration,Pressure,Acoustic_Level,Inspection_Duration,"
      "Technician_Availability,Downtime_Cost,Failure_Probability,Maintenance_Priority\n";
  for (std::size_t i = 0; i < rows; ++i) {
    const double temperature = rng.normal(75.0, 8.0);
    const double vibration = std::max(0.05, rng.normal(3.0, 1.0));
    const double pressure = rng.normal(100.0, 10.0);
    const double acoustic = rng.normal(60.0, 6.0);
    const double inspection = rng.uniform(1.0, 8.0);
    const bool technician = rng.uniform() < 0.7;
    const double downtime = rng.uniform(500.0, 5000.0);

    const double z_vib = (vibration - 3.0) / 1.0;
    const double z_temp = (temperature - 75.0) / 8.0;
    const double z_cost = (downtime - 2750.0) / 1299.0;
    const double failure = 1.0 / (1.0 + std::exp(-(0.9 * z_vib + 0.6 * z_temp + rng.normal(0.0, 0.15))));
    const double urgency = 0.55 * z_cost + 0.45 * z_vib + rng.normal(0.0, 0.03);
    const char* priority = urgency > 0.6 ? "High" : urgency > -0.4 ? "Medium" : "Low";

    out += fmt::format("M{:03d},{:.2f},{:.3f},{:.2f},{:.2f},{:.2f},{},{:.2f},{:.4f},{}\n", i % 100 + 1,
                       temperature, vibration, pressure, acoustic, inspection, technician ? "Yes" : "No",
                       downtime, failure, priority);
  }
  return out;
}

GmrData gmr_csv(std::size_t rows, std::uint64_t seed, std::size_t outliers) {
  Rng rng(seed);
  std::set<std::size_t> planted;
  while (planted.size() < std::min(outliers, rows)) planted.insert(rng.index(rows));

  GmrData data;
  data.outlier_rows.assign(planted.begin(), planted.end());
  data.csv =
      "Timestamp,Machine_ID,Operation_Mode,Temperature_C,Vibration_Hz,Power_Consumption_kW,"
      "Network_Latency_ms,Packet_Loss_%,Quality_Control_Defect_Rate_%,Production_Speed_units_per_hr,"
      "Predictive_Maintenance_Score,Error_Rate_%,Efficiency_Status\n";
  static const char* modes[] = {"Active", "Idle", "Maintenance"};
  for (std::size_t i = 0; i < rows; ++i) {
    const std::size_t t = i * 10;  // seconds
    const auto day = 1 + t / 86400;
    const auto hh = (t / 3600) % 24;
    const auto mm = (t / 60) % 60;
    const auto ss = t % 60;
    double latency = rng.normal(20.0, 3.0);
    double loss = rng.normal(1.0, 0.2);
    if (planted.count(i) != 0) {
      latency = 20.0 + 10.0 * 3.0 + std::abs(rng.normal(0.0, 1.0));
      loss = 1.0 + 10.0 * 0.2 + std::abs(rng.normal(0.0, 0.05));
    }
    const double temperature = rng.normal(60.0, 5.0);
    const double vibration = rng.normal(50.0, 5.0);
    const double power = rng.normal(5.0, 1.0);
    const double defect = rng.normal(2.0, 0.3);
    const double speed = rng.normal(300.0, 20.0);
    const double pm_score = rng.uniform();
    const double error_rate = rng.normal(3.0, 0.5);
    const double efficiency = (speed - 300.0) / 20.0 - (defect - 2.0) / 0.3 - (latency - 20.0) / 3.0;
    const char* status = efficiency > 1.0 ? "High" : efficiency > -1.0 ? "Medium" : "Low";
    data.csv += fmt::format("2024-01-{:02d} {:02d}:{:02d}:{:02d},M{:02d},{},{:.2f},{:.2f},{:.3f},{:.2f},{:.3f},{:.3f},"
                            "{:.1f},{:.4f},{:.3f},{}\n",
                            day, hh, mm, ss, i % 50 + 1, modes[rng.index(3)], temperature, vibration, power, latency,
                            loss, defect, speed, pm_score, error_rate, status);
  }
  return data;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw Error(ErrorCode::kSinkUnwritable, fmt::format("cannot write '{}'", path.string()));
}

}  // namespace rxm::synth
