#include "optomode_cli/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/core.h>

#include "optomode/errors.hpp"

namespace optomode::cli {

namespace {

namespace pt = boost::property_tree;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double to_number(const std::string& text, const std::string& where) {
  const std::string t = trim(text);
  try {
    std::size_t used = 0;
    const double v = std::stod(t, &used);
    if (used != t.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw ValidationError(fmt::format("{}: '{}' is not a number", where, text));
  }
}

bool to_bool(const std::string& text, const std::string& where) {
  std::string t = trim(text);
  std::transform(t.begin(), t.end(), t.begin(), [](unsigned char c) { return std::tolower(c); });
  if (t == "true" || t == "yes" || t == "on" || t == "1") return true;
  if (t == "false" || t == "no" || t == "off" || t == "0") return false;
  throw ValidationError(fmt::format("{}: '{}' is not a boolean", where, text));
}

std::uint64_t to_u64(const std::string& text, const std::string& where) {
  const std::string t = trim(text);
  try {
    std::size_t used = 0;
    if (!t.empty() && t[0] == '-') throw std::invalid_argument("negative");
    const auto v = std::stoull(t, &used);
    if (used != t.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw ValidationError(fmt::format("{}: '{}' is not an unsigned integer", where, text));
  }
}

double to_positive_integer(const std::string& text, const std::string& where) {
  const double v = to_number(text, where);
  if (!(v >= 1.0) || v != std::floor(v)) {
    throw ValidationError(fmt::format("{}: '{}' is not a positive integer", where, text));
  }
  return v;
}

using KeySet = std::set<std::string>;

void check_keys(const pt::ptree& section, const std::string& name, const KeySet& allowed) {
  for (const auto& [key, value] : section) {
    if (!allowed.count(key)) {
      throw ValidationError(fmt::format("[{}] unknown key '{}'", name, key));
    }
    if (!value.empty()) throw ValidationError(fmt::format("[{}] nested key '{}'", name, key));
  }
}

}  // namespace

std::vector<double> parse_number_list(const std::string& text) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (trim(item).empty()) continue;
    values.push_back(to_number(item, "number list"));
  }
  return values;
}

void ScenarioConfig::validate() const {
  if (dimensionless && preset) {
    throw ValidationError("config: give either a dimensionless model or a detector preset, not both");
  }
  if (dimensionless) dimensionless->validate();
  targets.validate();
  if (depths_absolute.empty() && depth_fractions.empty()) {
    throw ValidationError("config: the list of modulation depths is empty");
  }
  for (double f : depth_fractions) {
    if (!(f >= 0.0 && f <= 1.0)) {
      throw ValidationError(fmt::format(
          "config: depth fraction {} outside [0, 1]; depths above m_c exceed the parametric "
          "threshold",
          f));
    }
  }
  for (double d : depths_absolute) {
    if (!(d >= 0.0) || !std::isfinite(d)) {
      throw ValidationError(fmt::format("config: absolute depth {} must be >= 0", d));
    }
  }
  if (!(span > 0.0)) throw ValidationError("config: grid span must be positive");
  if (points < 3) throw ValidationError("config: grid needs at least 3 points");
  if (runs < 2) throw ValidationError("config: oracle needs at least 2 runs");
  if (!(dt > 0.0)) throw ValidationError("config: dt must be positive");
  if (!(noise_cutoff > 0.0)) throw ValidationError("config: noise_cutoff must be positive");
  if (!(band > 0.0)) throw ValidationError("config: band must be positive");
  if (!(tolerance > 0.0)) throw ValidationError("config: tolerance must be positive");
  if (sidebands < 1) throw ValidationError("config: sidebands must be >= 1");
  if (chain != "modal" && chain != "ladder") {
    throw ValidationError("config: output chain must be 'modal' or 'ladder'");
  }
}

std::vector<std::string> ScenarioConfig::describe() const {
  std::vector<std::string> lines;
  auto list = [](const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + fmt::format("{}", v[i]);
    return s;
  };
  if (preset) {
    lines.push_back("detector.preset = " + *preset);
    if (preset_file) lines.push_back("detector.preset_file = " + *preset_file);
    lines.push_back(fmt::format("detector.targets = A {}, g {}, alpha {}", targets.coupling,
                                targets.optical_damping, targets.feedback));
  } else {
    const DimensionlessParams dp = dimensionless.value_or(reference_params());
    lines.push_back(fmt::format("model = A {}, g {}, alpha {}, kappa {}", dp.coupling,
                                dp.optical_damping, dp.feedback, dp.kappa));
  }
  if (depths_absolute.empty()) {
    lines.push_back("modulation.depths (fraction of m_c) = " + list(depth_fractions));
  } else {
    lines.push_back("modulation.depths_absolute = " + list(depths_absolute));
  }
  lines.push_back(phase ? fmt::format("modulation.phase = {}", *phase)
                        : std::string("modulation.phase = auto (eps_11 real positive)"));
  lines.push_back(half_frequency ? fmt::format("modulation.half_frequency = {}", *half_frequency)
                                 : std::string("modulation.half_frequency = auto (omega_1)"));
  lines.push_back(fmt::format("grid = +/-{} gamma_1, {} points", span, points));
  lines.push_back(fmt::format("noise.thermal = {}", thermal));
  lines.push_back(fmt::format(
      "oracle = runs {}, steps {}, dt {}, noise_cutoff {}, band {} gamma, tolerance {}, "
      "sidebands {}, ringdown {}, corrupt_epsilon {}",
      runs, steps, dt, noise_cutoff, band, tolerance, sidebands, ringdown, corrupt_epsilon));
  lines.push_back(fmt::format("seed = {}", seed));
  lines.push_back(fmt::format("output = {}, chain {}", out_dir, chain));
  return lines;
}

ScenarioConfig parse_config(std::istream& in, const std::string& origin) {
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ValidationError(fmt::format("{}: {} (line {})", origin, e.message(), e.line()));
  }
  ScenarioConfig cfg;
  for (const auto& [name, section] : tree) {
    const std::string where = origin + " [" + name + "]";
    if (section.empty()) {
      if (name == "seed") {
        cfg.seed = to_u64(section.data(), where);
        continue;
      }
      throw ValidationError(fmt::format("{}: unknown top-level key or empty section '{}'",
                                        origin, name));
    }
    auto get = [&](const char* key) { return section.get_optional<std::string>(key); };
    if (name == "model") {
      check_keys(section, name, {"coupling", "optical_damping", "feedback", "kappa"});
      DimensionlessParams dp = reference_params();
      if (auto v = get("coupling")) dp.coupling = to_number(*v, where + " coupling");
      if (auto v = get("optical_damping")) dp.optical_damping = to_number(*v, where + " optical_damping");
      if (auto v = get("feedback")) dp.feedback = to_number(*v, where + " feedback");
      if (auto v = get("kappa")) dp.kappa = to_number(*v, where + " kappa");
      cfg.dimensionless = dp;
    } else if (name == "detector") {
      check_keys(section, name,
                 {"preset", "preset_file", "coupling", "optical_damping", "feedback"});
      const auto p = get("preset");
      if (!p || trim(*p).empty()) throw ValidationError(where + ": missing 'preset'");
      cfg.preset = trim(*p);
      if (auto v = get("preset_file")) cfg.preset_file = trim(*v);
      if (auto v = get("coupling")) cfg.targets.coupling = to_number(*v, where + " coupling");
      if (auto v = get("optical_damping"))
        cfg.targets.optical_damping = to_number(*v, where + " optical_damping");
      if (auto v = get("feedback")) cfg.targets.feedback = to_number(*v, where + " feedback");
    } else if (name == "modulation") {
      check_keys(section, name, {"depths", "depths_absolute", "phase", "half_frequency"});
      if (auto v = get("depths")) cfg.depth_fractions = parse_number_list(*v);
      if (auto v = get("depths_absolute")) cfg.depths_absolute = parse_number_list(*v);
      if (auto v = get("phase"); v && trim(*v) != "auto") cfg.phase = to_number(*v, where + " phase");
      if (auto v = get("half_frequency"); v && trim(*v) != "auto")
        cfg.half_frequency = to_number(*v, where + " half_frequency");
    } else if (name == "grid") {
      check_keys(section, name, {"span", "points"});
      if (auto v = get("span")) cfg.span = to_number(*v, where + " span");
      if (auto v = get("points"))
        cfg.points = static_cast<std::size_t>(to_positive_integer(*v, where + " points"));
    } else if (name == "noise") {
      check_keys(section, name, {"thermal"});
      if (auto v = get("thermal")) cfg.thermal = to_bool(*v, where + " thermal");
    } else if (name == "oracle") {
      check_keys(section, name,
                 {"runs", "steps", "dt", "noise_cutoff", "band", "tolerance", "sidebands",
                  "ringdown", "corrupt_epsilon", "threads", "seed"});
      if (auto v = get("runs")) cfg.runs = static_cast<int>(to_positive_integer(*v, where + " runs"));
      if (auto v = get("steps"))
        cfg.steps = static_cast<std::size_t>(to_positive_integer(*v, where + " steps"));
      if (auto v = get("dt")) cfg.dt = to_number(*v, where + " dt");
      if (auto v = get("noise_cutoff")) cfg.noise_cutoff = to_number(*v, where + " noise_cutoff");
      if (auto v = get("band")) cfg.band = to_number(*v, where + " band");
      if (auto v = get("tolerance")) cfg.tolerance = to_number(*v, where + " tolerance");
      if (auto v = get("sidebands"))
        cfg.sidebands = static_cast<int>(to_positive_integer(*v, where + " sidebands"));
      if (auto v = get("ringdown")) cfg.ringdown = to_bool(*v, where + " ringdown");
      if (auto v = get("corrupt_epsilon")) cfg.corrupt_epsilon = to_bool(*v, where + " corrupt_epsilon");
      if (auto v = get("threads"))
        cfg.threads = static_cast<unsigned>(to_positive_integer(*v, where + " threads"));
      if (auto v = get("seed")) cfg.seed = to_u64(*v, where + " seed");
    } else if (name == "output") {
      check_keys(section, name, {"directory", "plot", "chain"});
      if (auto v = get("directory")) cfg.out_dir = trim(*v);
      if (auto v = get("plot")) cfg.plot = to_bool(*v, where + " plot");
      if (auto v = get("chain")) cfg.chain = trim(*v);
    } else {
      throw ValidationError(fmt::format("{}: unknown section [{}]", origin, name));
    }
  }
  cfg.validate();
  return cfg;
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config file '" + path + "'");
  return parse_config(in, path);
}

}  // namespace optomode::cli
