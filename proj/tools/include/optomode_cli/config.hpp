#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "optomode/model.hpp"

namespace optomode::cli {

/// Resolved scenario. Config files use sections:
///
///   [model]       coupling, optical_damping, feedback, kappa
///   [detector]    preset, preset_file, coupling, optical_damping, feedback
///   [modulation]  depths (fractions of m_c) | depths_absolute, phase, half_frequency
///   [grid]        span (units of gamma_1), points
///   [noise]       thermal (true/false)
///   [oracle]      runs, steps, dt, noise_cutoff, band, tolerance, sidebands,
///                 ringdown, corrupt_epsilon, threads
///   [output]      directory, plot, chain (modal|ladder)
///   seed          top-level key, or [oracle] seed
///
/// [model] and [detector] are mutually exclusive; without either the
/// reference set (0.90, 0.1, 0.1) is used.
struct ScenarioConfig {
  // Model: exactly one of dimensionless / preset.
  std::optional<DimensionlessParams> dimensionless;
  std::optional<std::string> preset;
  std::optional<std::string> preset_file;
  DimensionlessParams targets{0.90, 0.1, 0.1, 1.0};  // closure targets for presets

  // Modulation.
  std::vector<double> depth_fractions{0.0, 0.5, 0.9};
  std::vector<double> depths_absolute;  // overrides fractions when non-empty
  std::optional<double> phase;           // default: eps_11 real positive
  std::optional<double> half_frequency;  // default: omega_1

  // Grid.
  double span = 10.0;
  std::size_t points = 2001;

  bool thermal = false;

  // Oracle.
  int runs = 16;
  std::size_t steps = std::size_t{1} << 19;
  double dt = 0.04;
  double noise_cutoff = 3.0;
  double band = 6.0;
  double tolerance = 0.05;
  int sidebands = 8;
  bool ringdown = true;
  bool corrupt_epsilon = false;
  unsigned threads = 0;
  std::uint64_t seed = 20240917;

  // Output.
  std::string out_dir;  // empty: spectrum writes to ".", other commands write no files
  bool plot = false;
  std::string chain = "modal";

  void validate() const;
  /// One "key = value" line per resolved setting, for file headers.
  std::vector<std::string> describe() const;
};

/// Parses the config format; unknown sections or keys are errors.
ScenarioConfig parse_config(std::istream& in, const std::string& origin = "<config>");
ScenarioConfig load_config(const std::string& path);

/// Comma-separated list of numbers ("0, 0.5,0.9").
std::vector<double> parse_number_list(const std::string& text);

}  // namespace optomode::cli
