#pragma once

// Slow-amplitude quadrature spectra of the eigenmodes under pump modulation.
//
// Unknowns of the coupled path are ordered (g1, g1+, g2, g2+). At solver
// frequency x:
//   slot 2j   : g_j at absolute frequency p + x, line offset p + x - omega_j
//   slot 2j+1 : conjugate amplitude drawing on absolute frequency x - p
// The quadratures of mode j at offset x combine slot 2j solved at
// x + omega_j - p with slot 2j+1 solved at x - omega_j + p:
//   G_j(+/-)(x) = (g_j ± g_j+) / sqrt(2).

#include <array>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "optomode/eigenmodes.hpp"
#include "optomode/noise.hpp"
#include "optomode/spectral_form.hpp"

namespace optomode {

/// How the modal forcings are drawn from the input noise.
struct Forcing {
  NoiseModel noise = NoiseModel::vacuum();
  /// Hard gate: forcing of mode j vanishes beyond gate_factor * gamma_j from its
  /// line. Unset means ungated.
  std::optional<double> gate_factor;
  /// Evaluate transfer coefficients and channel densities at the line centre
  /// for every offset (white modal forcing).
  bool narrowband = false;
};

struct QuadratureSpectrum {
  std::vector<double> grid;
  std::vector<double> plus;   // PSD of G_j(+)
  std::vector<double> minus;  // PSD of G_j(-)
  int mode_index = 0;
  ModulationParams modulation;
  Warnings warnings;
};

std::vector<double> linear_grid(double lo, double hi, std::size_t points);

/// [-10 gamma_1, 10 gamma_1] with 2001 points.
std::vector<double> default_grid(const ModeSet& modes);

/// Forcing of slot `slot` (see header comment) at solver frequency x.
SpectralForm modal_forcing_form(const ModeSet& modes, int slot, double x,
                                const ModulationParams& mod, const DimensionlessParams& dp,
                                const Forcing& forcing);

enum class Branch { kBoth, kPlus, kMinus };

/// Closed form for one isolated mode:
///   S(+)(x) = S_f(x) / ((gamma + |eps_jj|)^2 + x^2)
///   S(-)(x) = S_f(x) / ((gamma - |eps_jj|)^2 + x^2)
/// Throws InstabilityError when |eps_jj| >= gamma_j and the minus branch is requested.
QuadratureSpectrum decoupled_psd(const ModeSet& modes, const ModulationParams& mod,
                                 const std::vector<double>& grid,
                                 const DimensionlessParams& dp, const Forcing& forcing = {},
                                 int j = 0, Branch branch = Branch::kBoth);

struct CoupledSolution {
  Eigen::Matrix4cd system;    // acts on (g1, g1+, g2, g2+)
  Eigen::Matrix4cd transfer;  // system^-1: forcing slots -> unknowns
  double rcond = 0.0;
};

/// 4x4 linear system at solver frequency x. Throws NumericalError when the
/// system is singular (parametric threshold reached).
CoupledSolution coupled_solve(double x, const ModeSet& modes, const ModulationParams& mod);

/// G_j(+) and G_j(-) as linear forms of the input noise at offset x.
std::array<SpectralForm, 2> quadrature_forms(const ModeSet& modes, int j, double x,
                                             const ModulationParams& mod,
                                             const DimensionlessParams& dp,
                                             const Forcing& forcing);

std::array<QuadratureSpectrum, 2> quadrature_psd(const ModeSet& modes,
                                                 const ModulationParams& mod,
                                                 const std::vector<double>& grid,
                                                 const DimensionlessParams& dp,
                                                 const Forcing& forcing = {});

/// Trapezoidal integral of a sampled PSD divided by 2 pi.
double integrated_variance(const std::vector<double>& grid, const std::vector<double>& psd);

struct LineVariance {
  double plus = 0.0;
  double minus = 0.0;
};

enum class SolverPath { kDecoupled, kCoupled };

/// Variance of G_j(+/-) integrated over the whole real line through the
/// substitution x = gamma_j tan(theta). Needs a forcing that stays bounded
/// at large offsets (narrowband or gated). On the decoupled path the minus
/// variance is infinite at and above the critical depth.
LineVariance line_variance(const ModeSet& modes, const ModulationParams& mod,
                           const DimensionlessParams& dp, const Forcing& forcing, int j = 0,
                           SolverPath path = SolverPath::kCoupled, int nodes = 20000);

}  // namespace optomode
