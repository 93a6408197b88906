#pragma once

// Output light: a2_out = -a2_in - 2 kappa b1, demodulated at an eigenfrequency
//   A_phi(x) = (e^{i phi} a2_out(omega_j + x) + e^{-i phi} a2_out(x - omega_j)) / sqrt(2),
// phi = 0 giving A(+) and phi = pi/2 giving A(-) up to a unit factor.
//
// Two chains are provided. The modal chain keeps only the slow amplitude of
// the demodulated mode (b1 near omega_j ~ V_j g_j). The ladder chain solves
// the periodically modulated equations exactly in harmonic balance over a
// finite set of sidebands X + 2pk.

#include <limits>
#include <vector>

#include "optomode/spectral.hpp"

namespace optomode {

struct OutputTransfer {
  double direct = -1.0;  // coefficient of a2_in
  double cavity = 0.0;   // coefficient of b1
};

OutputTransfer output_quadrature_transfer(const DimensionlessParams& dp);

/// (e^{i phase} upper + e^{-i phase} lower) / sqrt(2).
SpectralForm demod_combination(const SpectralForm& upper, const SpectralForm& lower,
                               double phase);

struct OutputSpectrum {
  std::vector<double> grid;
  std::vector<double> plus;    // S_A(+) / shot noise
  std::vector<double> minus;   // S_A(-) / shot noise
  std::vector<double> unmod;   // same quadrature without modulation
  int mode_index = 0;
  double mode_weight = 0.0;    // V_j, b1 component of the mode vector
  ModulationParams modulation;
  Warnings warnings;
};

/// Largest offset for which the two sidebands of mode j stay separated.
double output_band_limit(const ModeSet& modes, int j);

/// Modal-chain A_phi as a linear form of the inputs. Throws ValidationError
/// when |x| >= output_band_limit.
SpectralForm modal_output_form(const ModeSet& modes, int j, double x, double phase,
                               const ModulationParams& mod, const DimensionlessParams& dp,
                               const Forcing& forcing);

OutputSpectrum output_psd(const ModeSet& modes, const ModulationParams& mod,
                          const std::vector<double>& grid, const DimensionlessParams& dp,
                          const Forcing& forcing = {}, int j = 0);

/// Normalized modal-chain PSD at one detection phase.
double output_psd_at_phase(const ModeSet& modes, const ModulationParams& mod, double x,
                           double phase, const DimensionlessParams& dp,
                           const Forcing& forcing = {}, int j = 0);

/// Power of the terms dropped by keeping a single modal summand, relative to
/// the retained summand: b1 near omega_j + x expanded over all four poles
/// (no modulation).
double single_summand_leakage(const ModeSet& modes, double x, const DimensionlessParams& dp,
                              const NoiseModel& noise = NoiseModel::vacuum(), int j = 0);

struct LadderOptions {
  int sidebands = 8;  // rungs k = -sidebands..sidebands
  /// Inputs at |X| above the cutoff are treated as absent.
  double noise_cutoff = std::numeric_limits<double>::infinity();
};

/// b1 at absolute frequency X, exact for the modulated equations up to ladder truncation.
SpectralForm ladder_b1_form(double X, const DimensionlessParams& dp,
                            const ModulationParams& mod, const NoiseModel& noise,
                            const LadderOptions& opts = {});

SpectralForm ladder_output_form(double X, const DimensionlessParams& dp,
                                const ModulationParams& mod, const NoiseModel& noise,
                                const LadderOptions& opts = {});

/// Normalized PSD of A_phi for demodulation at `demod_frequency`.
double ladder_demod_psd(double x, double demod_frequency, double phase,
                        const DimensionlessParams& dp, const ModulationParams& mod,
                        const NoiseModel& noise = NoiseModel::vacuum(),
                        const LadderOptions& opts = {});

OutputSpectrum ladder_output_psd(const ModeSet& modes, const ModulationParams& mod,
                                 const std::vector<double>& grid,
                                 const DimensionlessParams& dp,
                                 const NoiseModel& noise = NoiseModel::vacuum(), int j = 0,
                                 const LadderOptions& opts = {});

}  // namespace optomode
