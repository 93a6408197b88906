#include "optomode_cli/commands.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <ostream>

#include <CLI11.hpp>
#include <fmt/core.h>
#include <fmt/ostream.h>

#include "optomode/errors.hpp"
#include "optomode/oracle.hpp"
#include "optomode_cli/plot.hpp"

namespace optomode::cli {

namespace {

namespace fs = std::filesystem;

std::string num(double v) { return fmt::format("{:.15g}", v); }

std::ofstream open_output(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream f(path);
  if (!f) throw ValidationError("cannot write '" + path.string() + "'");
  return f;
}

void write_header(std::ostream& out, const std::string& title, const ScenarioConfig& cfg,
                  const std::vector<std::string>& extra = {}) {
  fmt::print(out, "# optomode {}\n", title);
  for (const auto& line : cfg.describe()) fmt::print(out, "# {}\n", line);
  for (const auto& line : extra) fmt::print(out, "# {}\n", line);
}

struct ResolvedDepth {
  double fraction;  // of m_c
  ModulationParams mod;
};

std::vector<ResolvedDepth> resolve_depths(const ScenarioConfig& cfg, const ModeSet& modes) {
  const double mc = critical_modulation(modes)[0];
  ModulationParams base = resonant_modulation(modes, 0.0, 0);
  if (cfg.phase) base.phase = *cfg.phase;
  if (cfg.half_frequency) base.half_frequency = *cfg.half_frequency;
  std::vector<ResolvedDepth> out;
  auto add = [&](double fraction, double depth) {
    if (depth >= mc) {
      throw InstabilityError(
          fmt::format("modulation depth {:.6g} reaches the parametric threshold m_c = {:.6g}; "
                      "no stationary spectrum exists at or above threshold",
                      depth, mc),
          1, "minus");
    }
    ModulationParams m = base;
    m.depth = depth;
    out.push_back({fraction, m});
  };
  if (!cfg.depths_absolute.empty()) {
    for (double d : cfg.depths_absolute) add(d / mc, d);
  } else {
    for (double f : cfg.depth_fractions) add(f, f * mc);
  }
  return out;
}

std::string vec_text(const Vec2c& v) {
  return fmt::format("({:.10g}{:+.10g}i, {:.10g}{:+.10g}i)", v(0).real(), v(0).imag(),
                     v(1).real(), v(1).imag());
}

}  // namespace

PresetCatalog preset_catalog(const ScenarioConfig& cfg) {
  if (cfg.preset_file) return load_presets_file(*cfg.preset_file);
  return builtin_presets();
}

Scenario resolve_scenario(const ScenarioConfig& cfg) {
  cfg.validate();
  Scenario s;
  if (cfg.preset) {
    const PresetCatalog catalog = preset_catalog(cfg);
    const DetectorPreset* p = catalog.find(*cfg.preset);
    if (!p) throw ValidationError("unknown preset '" + *cfg.preset + "'");
    s.bath = ThermalBath::close(*p, catalog.coating, cfg.targets.coupling,
                                cfg.targets.optical_damping);
    s.params = cfg.targets;
    s.params.kappa = s.bath->kappa;
  } else {
    s.params = cfg.dimensionless.value_or(reference_params());
    if (cfg.thermal) throw ValidationError("thermal noise needs a detector preset");
  }
  s.params.validate();
  return s;
}

int cmd_modes(const ScenarioConfig& cfg, std::ostream& out) {
  const Scenario sc = resolve_scenario(cfg);
  const ModeSet modes = find_modes(sc.params);
  const auto mc = critical_modulation(modes);
  const DimensionlessParams& dp = sc.params;

  fmt::print(out, "parameters: A = {}, g = {}, alpha = {}\n", dp.coupling, dp.optical_damping,
             dp.feedback);
  fmt::print(out, "characteristic roots:\n");
  for (const cplx& s : modes.roots) fmt::print(out, "  {:+.12f} {:+.12f}i\n", s.real(), s.imag());
  for (int j = 0; j < 2; ++j) {
    const EigenMode& m = modes[j];
    fmt::print(out, "mode {}: omega = {:.12g}, gamma = {:.12g}, Q = {:.6g}\n", j + 1,
               m.frequency, m.damping, m.quality_factor());
    fmt::print(out, "  v  = {}\n", vec_text(m.mode_vector));
    fmt::print(out, "  Pi = {}\n", vec_text(m.dual_vector));
    if (m.damping > 0.0) {
      fmt::print(out, "  m_c = {:.12g}\n", mc[static_cast<std::size_t>(j)]);
    } else {
      fmt::print(out, "  m_c = n/a (mode is not damped)\n");
    }
  }
  for (const auto& w : modes.warnings) fmt::print(out, "warning: {}\n", w);
  fmt::print(out, "verdict: {}\n", modes.stable ? "STABLE" : "UNSTABLE");

  if (!cfg.out_dir.empty()) {
    auto f = open_output(fs::path(cfg.out_dir) / "modes.csv");
    write_header(f, "modes", cfg, {std::string("verdict = ") + (modes.stable ? "STABLE" : "UNSTABLE")});
    f << "mode,omega,gamma,Q,m_c,v1_re,v1_im,v2_re,v2_im,pi1_re,pi1_im,pi2_re,pi2_im\n";
    for (int j = 0; j < 2; ++j) {
      const EigenMode& m = modes[j];
      fmt::print(f, "{},{},{},{},{},{},{},{},{},{},{},{},{}\n", j + 1, num(m.frequency),
                 num(m.damping), num(m.quality_factor()),
                 m.damping > 0.0 ? num(mc[static_cast<std::size_t>(j)]) : std::string("nan"),
                 num(m.mode_vector(0).real()), num(m.mode_vector(0).imag()),
                 num(m.mode_vector(1).real()), num(m.mode_vector(1).imag()),
                 num(m.dual_vector(0).real()), num(m.dual_vector(0).imag()),
                 num(m.dual_vector(1).real()), num(m.dual_vector(1).imag()));
    }
  }
  return kExitOk;
}

int cmd_spectrum(const ScenarioConfig& cfg, std::ostream& out) {
  const Scenario sc = resolve_scenario(cfg);
  const ModeSet modes = find_modes(sc.params);
  if (!modes.stable) throw NumericalError("spectrum: the unmodulated system is unstable");
  const double mc = critical_modulation(modes)[0];
  const auto depths = resolve_depths(cfg, modes);

  Forcing forcing;
  if (cfg.thermal) forcing.noise = NoiseModel::with_thermal(*sc.bath);
  const double half = cfg.span * modes[0].damping;
  const std::vector<double> grid = linear_grid(-half, half, cfg.points);
  LadderOptions ladder;
  ladder.sidebands = cfg.sidebands;

  const fs::path dir = cfg.out_dir.empty() ? fs::path(".") : fs::path(cfg.out_dir);
  PlotSpec plot;
  plot.title = "Output quadratures of mode 1, shot-noise normalized";
  plot.x_label = "dimensionless frequency offset x";
  plot.y_label = "S_A / shot noise";

  for (std::size_t k = 0; k < depths.size(); ++k) {
    const ResolvedDepth& d = depths[k];
    const auto internal = quadrature_psd(modes, d.mod, grid, sc.params, forcing);
    ModulationParams off = d.mod;
    off.depth = 0.0;
    const auto internal0 = quadrature_psd(modes, off, grid, sc.params, forcing);
    const OutputSpectrum output =
        cfg.chain == "ladder"
            ? ladder_output_psd(modes, d.mod, grid, sc.params, forcing.noise, 0, ladder)
            : output_psd(modes, d.mod, grid, sc.params, forcing, 0);

    const std::vector<std::string> extra{
        fmt::format("m_c = {}", num(mc)),
        fmt::format("depth = {} (fraction of m_c = {})", num(d.mod.depth), num(d.fraction)),
        fmt::format("phase = {}, half_frequency = {}", num(d.mod.phase),
                    num(d.mod.half_frequency))};
    const std::string tag = fmt::format("{:02d}", k);

    auto fo = open_output(dir / ("spectrum_" + tag + ".csv"));
    write_header(fo, "spectrum (output light, mode 1, " + cfg.chain + " chain)", cfg, extra);
    fo << "x,S_A_plus,S_A_minus,S_unmod\n";
    for (std::size_t i = 0; i < grid.size(); ++i) {
      fo << num(grid[i]) << ',' << num(output.plus[i]) << ',' << num(output.minus[i]) << ','
         << num(output.unmod[i]) << '\n';
    }
    auto fi = open_output(dir / ("internal_" + tag + ".csv"));
    write_header(fi, "spectrum (internal quadratures, mode 1)", cfg, extra);
    fi << "x,S_G_plus,S_G_minus,S_G_unmod\n";
    for (std::size_t i = 0; i < grid.size(); ++i) {
      fi << num(grid[i]) << ',' << num(internal[0].plus[i]) << ',' << num(internal[0].minus[i])
         << ',' << num(internal0[0].plus[i]) << '\n';
    }

    const std::size_t mid = grid.size() / 2;
    fmt::print(out,
               "depth {:.4g} m_c: S_A+(0) = {:.6g}, S_A-(0) = {:.6g}, S_unmod(0) = {:.6g}  -> "
               "{}, {}\n",
               d.fraction, output.plus[mid], output.minus[mid], output.unmod[mid],
               (dir / ("spectrum_" + tag + ".csv")).string(),
               (dir / ("internal_" + tag + ".csv")).string());
    for (const auto& w : internal[0].warnings) fmt::print(out, "warning: {}\n", w);

    const int colour = static_cast<int>(k);
    plot.series.push_back({fmt::format("A+ m = {:.2f} m_c", d.fraction), grid, output.plus, false, colour});
    plot.series.push_back({fmt::format("A- m = {:.2f} m_c", d.fraction), grid, output.minus, true, colour});
  }
  if (cfg.plot) {
    auto fp = open_output(dir / "spectrum.svg");
    write_svg(fp, plot);
    fmt::print(out, "plot: {}\n", (dir / "spectrum.svg").string());
  }
  return kExitOk;
}

int cmd_xi(const ScenarioConfig& cfg, std::ostream& out) {
  cfg.validate();
  const PresetCatalog catalog = preset_catalog(cfg);
  std::vector<DetectorPreset> selected;
  if (cfg.preset) {
    const DetectorPreset* p = catalog.find(*cfg.preset);
    if (!p) throw ValidationError("unknown preset '" + *cfg.preset + "'");
    selected.push_back(*p);
  } else {
    selected = catalog.presets;
  }
  if (selected.empty()) throw ValidationError("no presets to evaluate");

  struct Row {
    DetectorPreset preset;
    XiResult result;
  };
  std::vector<Row> rows;
  for (const auto& p : selected) rows.push_back({p, xi_factor(p, catalog.coating, cfg.targets)});

  fmt::print(out, "{:<10} {:>9} {:>9} {:>10} {:>10} {:>12} {:>12}\n", "preset", "xi", "reference",
             "deviation", "f1 [Hz]", "Gamma [1/s]", "Delta [1/s]");
  for (const auto& r : rows) {
    const std::string ref =
        r.preset.reference_xi ? fmt::format("{:.2f}", *r.preset.reference_xi) : "-";
    const std::string dev =
        r.preset.reference_xi
            ? fmt::format("{:+.1f}%", 100.0 * (r.result.xi / *r.preset.reference_xi - 1.0))
            : "-";
    fmt::print(out, "{:<10} {:>9.4f} {:>9} {:>10} {:>10.3f} {:>12.5g} {:>12.5g}\n",
               r.preset.name, r.result.xi, ref, dev, r.result.mode_frequency_hz,
               r.result.rates.relaxation_rate, r.result.rates.detuning);
  }

  if (!cfg.out_dir.empty()) {
    auto f = open_output(fs::path(cfg.out_dir) / "xi.csv");
    write_header(f, "xi", cfg);
    f << "preset,xi,reference_xi,f1_hz,relaxation_rate,detuning,S_thermal,S_quantum\n";
    for (const auto& r : rows) {
      f << r.preset.name << ',' << num(r.result.xi) << ','
        << (r.preset.reference_xi ? num(*r.preset.reference_xi) : std::string("")) << ','
        << num(r.result.mode_frequency_hz) << ',' << num(r.result.rates.relaxation_rate) << ','
        << num(r.result.rates.detuning) << ',' << num(r.result.thermal_psd) << ','
        << num(r.result.quantum_psd) << '\n';
    }
  }
  return kExitOk;
}

int cmd_oracle(const ScenarioConfig& cfg, std::ostream& out) {
  const Scenario sc = resolve_scenario(cfg);
  if (!cfg.depths_absolute.empty()) {
    throw ValidationError("oracle: depths must be given as fractions of m_c");
  }
  OracleConfig oc;
  oc.params = sc.params;
  oc.depth_fractions = cfg.depth_fractions;
  oc.runs = cfg.runs;
  oc.seed = cfg.seed;
  oc.dt = cfg.dt;
  oc.steps = cfg.steps;
  oc.noise_cutoff = cfg.noise_cutoff;
  oc.band_factor = cfg.band;
  oc.tolerance = cfg.tolerance;
  oc.ladder.sidebands = cfg.sidebands;
  oc.ringdown = cfg.ringdown;
  oc.corrupt_epsilon = cfg.corrupt_epsilon;
  oc.threads = cfg.threads;

  const OracleReport report = run_crosscheck(oc);
  write_header(out, "oracle", cfg);
  write_report(out, report);
  if (!cfg.out_dir.empty()) {
    auto f = open_output(fs::path(cfg.out_dir) / "oracle_report.txt");
    write_header(f, "oracle", cfg);
    write_report(f, report);
  }
  return report.pass ? kExitOk : kExitOracleFail;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"optomode: optomechanical eigenmode squeezing toolkit"};
  app.require_subcommand(1, 1);
  app.fallthrough();

  std::string config_path, preset, preset_file, depths, out_dir, chain;
  std::uint64_t seed = 0;
  int runs = 0;
  bool plot = false, thermal = false, corrupt = false;
  app.add_option("--config", config_path, "Scenario config file")->check(CLI::ExistingFile);
  app.add_option("--preset", preset, "Detector preset name");
  app.add_option("--preset-file", preset_file, "Preset file in the presets.ini format")
      ->check(CLI::ExistingFile);
  app.add_option("--depths", depths, "Comma-separated modulation depths as fractions of m_c");
  app.add_option("--out", out_dir, "Output directory");
  auto* seed_opt = app.add_option("--seed", seed, "Monte Carlo seed");
  auto* runs_opt = app.add_option("--runs", runs, "Monte Carlo runs per depth");
  app.add_option("--chain", chain, "Output chain for spectra: modal or ladder");
  app.add_flag("--plot", plot, "Also write an SVG plot");
  app.add_flag("--thermal", thermal, "Include coating thermal noise (needs a preset)");
  app.add_flag("--corrupt-epsilon", corrupt, "Oracle negative control: flip the eps sign");

  auto* modes = app.add_subcommand("modes", "Eigenmodes, dampings, critical depth, stability");
  auto* spectrum = app.add_subcommand("spectrum", "Internal and output quadrature spectra");
  auto* xi = app.add_subcommand("xi", "Thermal/quantum ratio for detector presets");
  auto* oracle = app.add_subcommand("oracle", "Monte Carlo crosscheck of the spectra");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << app.help();
    return kExitValidation;
  }

  try {
    ScenarioConfig cfg = config_path.empty() ? ScenarioConfig{} : load_config(config_path);
    if (!preset.empty()) {
      if (cfg.dimensionless) {
        throw ValidationError("--preset conflicts with the [model] section of the config");
      }
      cfg.preset = preset;
    }
    if (!preset_file.empty()) cfg.preset_file = preset_file;
    if (!depths.empty()) {
      cfg.depth_fractions = parse_number_list(depths);
      cfg.depths_absolute.clear();
      if (cfg.depth_fractions.empty()) throw ValidationError("--depths: empty depth list");
    }
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    if (*seed_opt) cfg.seed = seed;
    if (*runs_opt) cfg.runs = runs;
    if (!chain.empty()) cfg.chain = chain;
    if (plot) cfg.plot = true;
    if (thermal) cfg.thermal = true;
    if (corrupt) cfg.corrupt_epsilon = true;
    cfg.validate();

    if (modes->parsed()) return cmd_modes(cfg, out);
    if (spectrum->parsed()) return cmd_spectrum(cfg, out);
    if (xi->parsed()) return cmd_xi(cfg, out);
    if (oracle->parsed()) return cmd_oracle(cfg, out);
    err << "error: no command\n";
    return kExitValidation;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const InstabilityError& e) {
    err << "error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const NumericalError& e) {
    err << "error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  }
}

}  // namespace optomode::cli
