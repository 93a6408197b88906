#pragma once

// Time-domain Monte Carlo integration of the modulated equations
//   b1'' + g b1' + 2 b1 + A(t) z = nu1
//   z''  - alpha b1' - A(t) b1   = nu2,     A(t) = A (1 + 2|m| cos(2 p t + phi))
// driven by band-limited vacuum noise synthesized in the frequency domain,
// plus lock-in demodulation of a2_out and comparison against integrated
// spectra.

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "optomode/readout.hpp"

namespace optomode {

struct SimulationConfig {
  DimensionlessParams params = reference_params();
  ModulationParams modulation;
  double dt = 0.04;
  std::size_t steps = std::size_t{1} << 19;  // full RK4 steps
  double noise_cutoff = 3.0;                 // input noise band |X| <= cutoff
  bool noise = true;
  std::uint64_t seed = 1;
  std::uint64_t run_index = 0;
  /// Initial (b1, z, b1', z').
  std::array<double, 4> initial_state{0.0, 0.0, 0.0, 0.0};
  /// Leading time excluded from statistics; negative selects 10 / min gamma.
  double transient = -1.0;
};

struct SimulationRun {
  SimulationConfig config;
  std::size_t transient_steps = 0;
  std::vector<double> b1;      // at t_n = n dt, n = 0..steps
  std::vector<double> z;
  std::vector<double> a2_out;  // -a2_in - 2 kappa b1

  double time(std::size_t n) const { return static_cast<double>(n) * config.dt; }
  double duration() const;  // stationary part
};

/// Integrates one realization. Deterministic in (seed, run_index). Throws
/// ValidationError on a violated step guard or a supercritical depth and
/// InstabilityError when the state grows beyond 1e6 times its reference scale.
SimulationRun simulate(const SimulationConfig& config);

struct DemodResult {
  double mean = 0.0;
  double variance = 0.0;
  double error = 0.0;  // jackknife standard error of the variance
  std::size_t samples = 0;
};

/// Multiplies `signal` (sampled at dt from t0) by cos(omega t + phase),
/// applies a brick-wall low-pass at `band`, and returns the variance with a
/// block-jackknife error. Throws ValidationError when the record is shorter
/// than `min_duration`.
DemodResult demodulate(const std::vector<double>& signal, double dt, double t0, double omega,
                       double phase, double band, double min_duration = 0.0, int blocks = 16);

/// Demodulates the stationary part of a run at mode j; needs >= 50 / gamma_j.
DemodResult demodulate(const SimulationRun& run, const ModeSet& modes, int j, double phase,
                       double band);

/// Delete-one jackknife of the mean of independent estimates.
DemodResult jackknife_mean(const std::vector<double>& estimates);

struct RingdownFit {
  std::array<cplx, 2> roots;  // positive-frequency s = omega - i gamma, ascending omega
};

/// Order-4 linear prediction on samples taken every `stride` steps.
RingdownFit ringdown_fit(const std::vector<double>& series, double dt, std::size_t stride,
                         std::size_t first = 0, std::size_t count = 0);

/// Variance of the demodulated output predicted by the exact ladder chain:
/// (1/4) * integral over |x| <= band of the normalized A_phi PSD, / 2 pi.
double analytic_demod_variance(const DimensionlessParams& dp, const ModulationParams& mod,
                               double demod_frequency, double phase, double band,
                               const LadderOptions& opts, int nodes = 801);

/// Same prediction from the slow-amplitude chain.
double modal_demod_variance(const ModeSet& modes, const ModulationParams& mod,
                            const DimensionlessParams& dp, int j, double phase, double band,
                            int nodes = 801);

struct QuadratureCheck {
  double depth_fraction = 0.0;
  int mode = 0;                 // 1-based
  std::string quadrature;       // "plus" or "minus"
  double monte_carlo = 0.0;
  double monte_carlo_error = 0.0;
  double analytic = 0.0;
  double modal = 0.0;           // slow-amplitude prediction, diagnostic
  double relative_error = 0.0;
  double allowed = 0.0;         // max(3 sigma, 5%) relative
  bool pass = false;
};

/// PASS iff |mc - analytic| <= max(sigmas * error, tolerance * analytic).
QuadratureCheck crosscheck(double monte_carlo, double error, double analytic,
                           double tolerance = 0.05, double sigmas = 3.0);

struct RingdownCheck {
  int mode = 0;
  double expected_frequency = 0.0;
  double expected_damping = 0.0;
  double fitted_frequency = 0.0;
  double fitted_damping = 0.0;
  double relative_error = 0.0;  // on the damping
  bool pass = false;
};

struct OracleConfig {
  DimensionlessParams params = reference_params();
  std::vector<double> depth_fractions{0.0, 0.5, 0.7};
  int runs = 16;
  std::uint64_t seed = 20240917;
  double dt = 0.04;
  std::size_t steps = std::size_t{1} << 19;
  double noise_cutoff = 3.0;
  double band_factor = 6.0;   // low-pass band B_j = band_factor * gamma_j
  double tolerance = 0.05;
  double sigmas = 3.0;
  LadderOptions ladder{};
  bool ringdown = true;
  /// Negative control: evaluate the analytic side with eps -> -eps.
  bool corrupt_epsilon = false;
  unsigned threads = 0;  // 0 selects hardware concurrency
};

struct OracleReport {
  OracleConfig config;
  double critical_depth = 0.0;
  std::vector<QuadratureCheck> checks;
  std::vector<RingdownCheck> ringdown;
  bool pass = false;
  double seconds = 0.0;
};

OracleReport run_crosscheck(const OracleConfig& config);

void write_report(std::ostream& out, const OracleReport& report);

/// CSV dump of (t, b1, z) every `stride` steps, preceded by '#' header lines.
void write_trajectory_csv(std::ostream& out, const SimulationRun& run, std::size_t stride,
                          const std::vector<std::string>& header = {});

}  // namespace optomode
