#include "optomode/noise.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <Eigen/LU>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/core.h>

#include "optomode/errors.hpp"

namespace optomode {

extern const char* const kBuiltinPresetsIni;

namespace {

namespace pt = boost::property_tree;
using constants::kBoltzmann;
using constants::kHbar;
using constants::kPi;

void require_positive(double v, const std::string& what) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw ValidationError(fmt::format("{} must be positive and finite (got {})", what, v));
  }
}

void require_poisson(double v, const std::string& what) {
  if (!(v > 0.0 && v < 0.5)) {
    throw ValidationError(fmt::format("{} must lie in (0, 0.5) (got {})", what, v));
  }
}

double get_double(const pt::ptree& section, const std::string& section_name,
                  const std::string& key) {
  const auto value = section.get_optional<std::string>(key);
  if (!value) {
    throw ValidationError(fmt::format("[{}] is missing key '{}'", section_name, key));
  }
  try {
    std::size_t used = 0;
    const double v = std::stod(*value, &used);
    if (used != value->size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw ValidationError(
        fmt::format("[{}] {} = '{}' is not a number", section_name, key, *value));
  }
}

std::optional<double> get_optional_double(const pt::ptree& section,
                                          const std::string& section_name,
                                          const std::string& key) {
  if (!section.get_optional<std::string>(key)) return std::nullopt;
  return get_double(section, section_name, key);
}

void read_coating(const pt::ptree& s, CoatingParams& c) {
  const std::string name = "coating";
  auto opt = [&](const char* key, double& field) {
    if (auto v = get_optional_double(s, name, key)) field = *v;
  };
  opt("temperature", c.temperature);
  if (auto v = get_optional_double(s, name, "layer_pairs")) {
    if (*v != std::floor(*v)) throw ValidationError("[coating] layer_pairs must be an integer");
    c.layer_pairs = static_cast<int>(*v);
  }
  opt("substrate_index", c.substrate_index);
  opt("substrate_young", c.substrate_young);
  opt("substrate_poisson", c.substrate_poisson);
  opt("substrate_loss", c.substrate_loss);
  opt("layer1_index", c.layer1_index);
  opt("layer1_young", c.layer1_young);
  opt("layer1_poisson", c.layer1_poisson);
  opt("layer1_loss", c.layer1_loss);
  opt("layer2_index", c.layer2_index);
  opt("layer2_young", c.layer2_young);
  opt("layer2_poisson", c.layer2_poisson);
  opt("layer2_loss", c.layer2_loss);
  for (const auto& [key, _] : s) {
    static const char* known[] = {"temperature",      "layer_pairs",     "substrate_index",
                                  "substrate_young",  "substrate_poisson", "substrate_loss",
                                  "layer1_index",     "layer1_young",    "layer1_poisson",
                                  "layer1_loss",      "layer2_index",    "layer2_young",
                                  "layer2_poisson",   "layer2_loss"};
    bool ok = false;
    for (const char* k : known) ok = ok || key == k;
    if (!ok) throw ValidationError(fmt::format("[coating] unknown key '{}'", key));
  }
}

DetectorPreset read_preset(const std::string& name, const pt::ptree& s) {
  const std::string section = "preset:" + name;
  DetectorPreset p;
  p.name = name;
  p.arm_length = get_double(s, section, "arm_length");
  p.reduced_mass = get_double(s, section, "reduced_mass");
  p.beam_radius = get_double(s, section, "beam_radius");
  p.arm_power_kw = get_double(s, section, "power_kw");
  if (auto v = get_optional_double(s, section, "wavelength")) p.wavelength = *v;
  p.temperature = get_optional_double(s, section, "temperature");
  p.reference_xi = get_optional_double(s, section, "reference_xi");
  for (const auto& [key, _] : s) {
    if (key != "arm_length" && key != "reduced_mass" && key != "beam_radius" &&
        key != "power_kw" && key != "wavelength" && key != "temperature" &&
        key != "reference_xi") {
      throw ValidationError(fmt::format("[{}] unknown key '{}'", section, key));
    }
  }
  p.validate();
  return p;
}

}  // namespace

double CoatingParams::thickness1(double wavelength) const {
  return layer_pairs * wavelength / (4.0 * layer1_index);
}

double CoatingParams::thickness2(double wavelength) const {
  return layer_pairs * wavelength / (4.0 * layer2_index);
}

void CoatingParams::validate() const {
  require_positive(temperature, "coating temperature");
  if (layer_pairs <= 0) throw ValidationError("coating layer_pairs must be positive");
  require_positive(substrate_index, "substrate_index");
  require_positive(substrate_young, "substrate_young");
  require_positive(substrate_loss, "substrate_loss");
  require_positive(layer1_index, "layer1_index");
  require_positive(layer1_young, "layer1_young");
  require_positive(layer1_loss, "layer1_loss");
  require_positive(layer2_index, "layer2_index");
  require_positive(layer2_young, "layer2_young");
  require_positive(layer2_loss, "layer2_loss");
  require_poisson(substrate_poisson, "substrate_poisson");
  require_poisson(layer1_poisson, "layer1_poisson");
  require_poisson(layer2_poisson, "layer2_poisson");
}

void DetectorPreset::validate() const {
  const std::string who = name.empty() ? std::string("preset") : "preset " + name;
  require_positive(arm_length, who + " arm_length");
  require_positive(reduced_mass, who + " reduced_mass");
  require_positive(beam_radius, who + " beam_radius");
  require_positive(arm_power_kw, who + " power_kw");
  require_positive(wavelength, who + " wavelength");
  if (temperature) require_positive(*temperature, who + " temperature");
  if (reference_xi && !(*reference_xi >= 0.0)) {
    throw ValidationError(who + " reference_xi must be non-negative");
  }
}

const DetectorPreset* PresetCatalog::find(const std::string& name) const {
  for (const auto& p : presets) {
    if (p.name == name) return &p;
  }
  return nullptr;
}

PresetCatalog load_presets(std::istream& in) {
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ValidationError(fmt::format("preset file: {} (line {})", e.message(), e.line()));
  }
  PresetCatalog catalog;
  const std::string prefix = "preset:";
  for (const auto& [section, body] : tree) {
    if (section == "coating") {
      read_coating(body, catalog.coating);
    } else if (section.rfind(prefix, 0) == 0) {
      const std::string name = section.substr(prefix.size());
      if (name.empty()) throw ValidationError("preset section without a name");
      if (catalog.find(name)) throw ValidationError("duplicate preset '" + name + "'");
      catalog.presets.push_back(read_preset(name, body));
    } else if (body.empty() && !body.data().empty()) {
      throw ValidationError(fmt::format("preset file: key '{}' outside any section", section));
    } else {
      throw ValidationError(fmt::format("preset file: unknown section [{}]", section));
    }
  }
  catalog.coating.validate();
  return catalog;
}

PresetCatalog load_presets_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open preset file '" + path + "'");
  return load_presets(in);
}

const PresetCatalog& builtin_presets() {
  static const PresetCatalog catalog = [] {
    std::istringstream in(kBuiltinPresetsIni);
    return load_presets(in);
  }();
  return catalog;
}

double thermal_psd(double frequency_hz, const DetectorPreset& preset,
                   const CoatingParams& c, const ClosureResult& rates) {
  if (!(frequency_hz > 0.0) || !std::isfinite(frequency_hz)) {
    throw ValidationError(
        fmt::format("thermal_psd: frequency must be positive (got {} Hz)", frequency_hz));
  }
  const double w = preset.beam_radius;
  const double lambda = preset.wavelength;
  const double temp = preset.temperature_or(c);
  const double Y = c.substrate_young;
  const double s = c.substrate_poisson;
  const double d1 = c.thickness1(lambda);
  const double d2 = c.thickness2(lambda);
  const double s1 = c.layer1_poisson;
  const double s2 = c.layer2_poisson;
  const double sqrt_pi = std::sqrt(kPi);

  const double phi_par =
      (1.0 + s) * (1.0 - 2.0 * s * s) / (sqrt_pi * w * Y * (1.0 - s)) *
      (c.layer1_young * d1 * c.layer1_loss / (1.0 - s1 * s1) +
       c.layer2_young * d2 * c.layer2_loss / (1.0 - s2 * s2));
  const double phi_perp =
      Y / (sqrt_pi * w * (1.0 - s * s)) *
      ((1.0 + s1) * (1.0 - 2.0 * s1) * d1 * c.layer1_loss / (c.layer1_young * (1.0 - s1)) +
       (1.0 + s2) * (1.0 - 2.0 * s2) * d2 * c.layer2_loss / (c.layer2_young * (1.0 - s2)));

  const double displacement = 2.0 * kBoltzmann * temp * (1.0 - s * s) /
                              (std::pow(kPi, 1.5) * frequency_hz * w * Y) *
                              (phi_par + phi_perp);
  const double tau = preset.arm_length / constants::kSpeedOfLight;
  return preset.reduced_mass * rates.detuning / (2.0 * kHbar * tau) * displacement;
}

ThermalBath ThermalBath::close(const DetectorPreset& preset, const CoatingParams& coating,
                               double coupling, double optical_damping) {
  preset.validate();
  coating.validate();
  ThermalBath bath;
  bath.preset = preset;
  bath.coating = coating;
  bath.rates = close_parameters(preset.arm_length, preset.reduced_mass,
                                preset.equivalent_power(), preset.wavelength, coupling,
                                optical_damping);
  const double tau = preset.arm_length / constants::kSpeedOfLight;
  bath.kappa = std::sqrt(bath.rates.relaxation_rate * tau);
  return bath;
}

double ThermalBath::referred_psd(double x) const {
  const double ax = std::abs(x);
  if (ax == 0.0) return 0.0;  // enters multiplied by x^4
  const double f = to_hertz(ax, rates.relaxation_rate, rates.detuning);
  // One-sided per-Hz density split over positive and negative frequencies.
  return 0.5 * kappa * kappa * thermal_psd(f, preset, coating, rates);
}

NoiseModel NoiseModel::with_thermal(ThermalBath bath) {
  NoiseModel m;
  m.thermal_ = std::move(bath);
  m.thermal_enabled_ = true;
  return m;
}

NoiseModel NoiseModel::quantum_only() const {
  NoiseModel m = *this;
  m.quantum_ = true;
  m.thermal_enabled_ = false;
  return m;
}

NoiseModel NoiseModel::thermal_only() const {
  if (!thermal_) throw ValidationError("thermal_only: no thermal source configured");
  NoiseModel m = *this;
  m.quantum_ = false;
  m.thermal_enabled_ = true;
  return m;
}

ChannelPsd NoiseModel::channel_psd(double x) const {
  const double q = quantum_ ? vacuum_psd() : 0.0;
  const double th = include_thermal() ? thermal_->referred_psd(x) : 0.0;
  return {q, q, th};
}

Eigen::Matrix<cplx, 2, kNoiseChannels> NoiseModel::forcing_transfer(
    double x, const DimensionlessParams& dp) const {
  const double g = dp.optical_damping;
  const double k = dp.kappa;
  Eigen::Matrix<cplx, 2, kNoiseChannels> t;
  t(0, 0) = -(g / k) * cplx(g / 2.0, -x);
  t(0, 1) = -(g / k) * std::sqrt(2.0 - g * g / 4.0);
  t(0, 2) = 0.0;
  t(1, 0) = 0.0;
  t(1, 1) = kI * x * dp.feedback / (2.0 * k);
  t(1, 2) = -x * x / k;
  return t;
}

Mat2c forcing_cross_spectrum(double x, const DimensionlessParams& dp, const NoiseModel& noise) {
  const auto t = noise.forcing_transfer(x, dp);
  const ChannelPsd s = noise.channel_psd(x);
  Eigen::Matrix<double, kNoiseChannels, 1> d;
  d << s[0], s[1], s[2];
  return t * d.asDiagonal() * t.adjoint();
}

double modal_forcing_psd(const ModeSet& modes, int j, double x, double band,
                         const DimensionlessParams& dp, const NoiseModel& noise,
                         Warnings* warnings) {
  if (!(band > 0.0)) throw ValidationError("modal_forcing_psd: band must be positive");
  const EigenMode& mode = modes[j];
  if (warnings) {
    if (band < 3.0 * mode.damping) {
      warnings->push_back(fmt::format(
          "band {:.4g} under-covers the mode-{} line (3 gamma = {:.4g})", band, j + 1,
          3.0 * mode.damping));
    }
    if (band > std::abs(modes.separation()) / 2.0) {
      warnings->push_back(fmt::format(
          "band {:.4g} exceeds half the mode separation {:.4g}; bands overlap", band,
          std::abs(modes.separation()) / 2.0));
    }
  }
  if (std::abs(x) > band) return 0.0;
  const double X = mode.frequency + x;
  const ChannelRow row =
      kI * mode.dual_vector.transpose() * noise.forcing_transfer(X, dp) / (2.0 * mode.frequency);
  return noise.psd(SpectralForm::single(X, row));
}

XiResult xi_factor(const DetectorPreset& preset, const CoatingParams& coating,
                   const DimensionlessParams& targets) {
  XiResult r;
  const ThermalBath bath =
      ThermalBath::close(preset, coating, targets.coupling, targets.optical_damping);
  r.rates = bath.rates;
  r.params = targets;
  r.params.kappa = bath.kappa;

  const ModeSet modes = find_modes(r.params);
  const double x = modes[0].frequency;
  r.mode_frequency_hz = to_hertz(x, r.rates.relaxation_rate, r.rates.detuning);

  // With no modulation A1+ at the line centre is a2_out at the mode frequency.
  const NoiseModel full = NoiseModel::with_thermal(bath);
  const Mat2c m_inv = system_matrix(x, r.params).inverse();
  const auto transfer = full.forcing_transfer(x, r.params);
  ChannelRow a2_out = -2.0 * r.params.kappa * (m_inv.row(0) * transfer);
  a2_out(static_cast<int>(Channel::kPhaseIn)) -= 1.0;
  const SpectralForm out = SpectralForm::single(x, a2_out);

  r.thermal_psd = full.thermal_only().psd(out) / NoiseModel::vacuum_psd();
  r.quantum_psd = full.quantum_only().psd(out) / NoiseModel::vacuum_psd();
  if (!(r.quantum_psd > 0.0)) throw NumericalError("xi_factor: vanishing quantum spectrum");
  r.xi = std::sqrt(r.thermal_psd / r.quantum_psd);
  return r;
}

}  // namespace optomode
