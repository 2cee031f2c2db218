// rxm_synth: write the synthetic maintenance tables used by the tests.

#include <iostream>

#include <CLI11.hpp>

#include "rxm/core/error.hpp"
#include "synth/synth.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Synthetic SMMD- and 6GMR-shaped CSV generator"};
  std::string kind = "smmd", out;
  std::size_t rows = 0, outliers = 50;
  std::uint64_t seed = 0;
  app.add_option("--kind", kind, "smmd or 6gmr")->check(CLI::IsMember({"smmd", "6gmr"}));
  app.add_option("--rows", rows, "Row count (default 1430 / 10000)");
  app.add_option("--seed", seed, "Random seed (default 7 / 11)");
  app.add_option("--outliers", outliers, "Planted outliers (6gmr)");
  app.add_option("--out", out, "Output path")->required();
  CLI11_PARSE(app, argc, argv);
  try {
    if (kind == "smmd") {
      rxm::synth::write_text(out, rxm::synth::smmd_csv(rows ? rows : 1430, seed ? seed : 7));
    } else {
      rxm::synth::write_text(out, rxm::synth::gmr_csv(rows ? rows : 10000, seed ? seed : 11, outliers).csv);
    }
  } catch (const rxm::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
