#pragma once

// Forcing noise of the coupled equations: vacuum inputs entering through the
// optical channel and the feedback loop, plus optional coating Brownian
// thermal motion of the movable mirror.
//
// Convention: double-sided symmetrized spectral densities, vacuum quadrature
// level 1/2. The thermal channel carries the referred displacement
// zeta = kappa * z_th and enters nu2 as -x^2 zeta / kappa, so every forcing
// scales as 1/kappa and kappa cancels from shot-noise normalized outputs.

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "optomode/eigenmodes.hpp"
#include "optomode/model.hpp"
#include "optomode/spectral_form.hpp"

namespace optomode {

/// Coating Brownian noise parameters: a stack of N quarter-wave pairs of
/// layer 1 (high index) and layer 2 (low index) on a substrate.
struct CoatingParams {
  double temperature = 290.0;
  int layer_pairs = 20;
  double substrate_index = 1.45;
  double substrate_young = 72e9;
  double substrate_poisson = 0.17;
  double substrate_loss = 4e-10;
  double layer1_index = 2.035;
  double layer1_young = 140e9;
  double layer1_poisson = 0.23;
  double layer1_loss = 2e-4;
  double layer2_index = 1.45;
  double layer2_young = 72e9;
  double layer2_poisson = 0.17;
  double layer2_loss = 4e-5;

  /// Total thickness N lambda / (4 n) of all layers of one kind.
  double thickness1(double wavelength) const;
  double thickness2(double wavelength) const;

  void validate() const;
};

struct DetectorPreset {
  std::string name;
  double arm_length = 0.0;      // m
  double reduced_mass = 0.0;    // kg
  double beam_radius = 0.0;     // m
  double arm_power_kw = 0.0;    // per-arm circulating power
  double wavelength = 1.064e-6;
  std::optional<double> temperature;   // overrides the coating temperature
  std::optional<double> reference_xi;  // published thermal/quantum ratio, if any

  /// Power of the equivalent single cavity: twice the per-arm power.
  double equivalent_power() const { return 2.0 * arm_power_kw * 1e3; }
  double temperature_or(const CoatingParams& coating) const {
    return temperature.value_or(coating.temperature);
  }
  void validate() const;
};

struct PresetCatalog {
  CoatingParams coating;
  std::vector<DetectorPreset> presets;

  const DetectorPreset* find(const std::string& name) const;
};

/// Parses the sectioned key-value preset format (see data/presets.ini).
PresetCatalog load_presets(std::istream& in);
PresetCatalog load_presets_file(const std::string& path);
/// The five detectors shipped with the library.
const PresetCatalog& builtin_presets();

/// Coating Brownian displacement spectrum converted to the dimensionless
/// mechanical coordinate: (mu Delta / 2 hbar tau) * S_y(f). S_y is the
/// one-sided per-Hz expression of the standard layer formula.
double thermal_psd(double frequency_hz, const DetectorPreset& preset,
                   const CoatingParams& coating, const ClosureResult& rates);

/// Closed detector description used by the thermal channel.
struct ThermalBath {
  DetectorPreset preset;
  CoatingParams coating;
  ClosureResult rates;
  double kappa = 1.0;  // physical sqrt(Gamma tau)

  static ThermalBath close(const DetectorPreset& preset, const CoatingParams& coating,
                           double coupling, double optical_damping);

  /// Double-sided PSD of the referred thermal channel at dimensionless frequency x.
  double referred_psd(double x) const;
};

class NoiseModel {
 public:
  NoiseModel() = default;

  static NoiseModel vacuum() { return NoiseModel{}; }
  static NoiseModel with_thermal(ThermalBath bath);

  NoiseModel quantum_only() const;
  NoiseModel thermal_only() const;

  bool include_quantum() const { return quantum_; }
  bool include_thermal() const { return thermal_.has_value() && thermal_enabled_; }
  const std::optional<ThermalBath>& thermal() const { return thermal_; }

  static constexpr double vacuum_psd() { return 0.5; }

  /// PSD of each independent input channel at absolute frequency x.
  ChannelPsd channel_psd(double x) const;

  /// nu(x) = T(x) n(x) with n = (a1_in, a2_in, zeta_th).
  Eigen::Matrix<cplx, 2, kNoiseChannels> forcing_transfer(double x,
                                                          const DimensionlessParams& dp) const;

  double psd(const SpectralForm& form) const {
    return form.psd([this](double x) { return channel_psd(x); });
  }

 private:
  bool quantum_ = true;
  bool thermal_enabled_ = false;
  std::optional<ThermalBath> thermal_;
};

/// 2x2 Hermitian cross-spectral matrix of (nu1, nu2).
Mat2c forcing_cross_spectrum(double x, const DimensionlessParams& dp,
                             const NoiseModel& noise = NoiseModel::vacuum());

/// PSD of the modal forcing f_j = i (Pi_j nu) / (2 omega_j) at offset x from
/// the mode line; zero outside |x| <= band. Warns when the band under-covers
/// the line (< 3 gamma_j) or reaches the other mode (> half the separation).
double modal_forcing_psd(const ModeSet& modes, int j, double x, double band,
                         const DimensionlessParams& dp,
                         const NoiseModel& noise = NoiseModel::vacuum(),
                         Warnings* warnings = nullptr);

struct XiResult {
  double xi = 0.0;
  double thermal_psd = 0.0;   // output A1+ spectral density, thermal forcing only
  double quantum_psd = 0.0;   // same, vacuum forcing only
  double mode_frequency_hz = 0.0;
  ClosureResult rates;
  DimensionlessParams params;  // closed parameters, physical kappa
};

/// Thermal/quantum ratio sqrt(S_th / S_q) of the A1+ output quadrature at the
/// mode-1 line without modulation. `targets` supplies (A, g, alpha).
XiResult xi_factor(const DetectorPreset& preset, const CoatingParams& coating,
                   const DimensionlessParams& targets);

}  // namespace optomode
