#pragma once

#include <iosfwd>
#include <optional>

#include "optomode/noise.hpp"
#include "optomode_cli/config.hpp"

namespace optomode::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitValidation = 1,
  kExitNumerical = 2,
  kExitOracleFail = 3,
};

struct Scenario {
  DimensionlessParams params;
  std::optional<ThermalBath> bath;  // set for detector presets
};

PresetCatalog preset_catalog(const ScenarioConfig& cfg);
Scenario resolve_scenario(const ScenarioConfig& cfg);

int cmd_modes(const ScenarioConfig& cfg, std::ostream& out);
int cmd_spectrum(const ScenarioConfig& cfg, std::ostream& out);
int cmd_xi(const ScenarioConfig& cfg, std::ostream& out);
int cmd_oracle(const ScenarioConfig& cfg, std::ostream& out);

/// Full command-line entry point; maps exceptions to exit codes.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace optomode::cli
