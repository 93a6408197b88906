#include "optomode/readout.hpp"

#include <cmath>

#include <Eigen/LU>
#include <fmt/core.h>

#include "optomode/errors.hpp"

namespace optomode {

namespace {

const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

SpectralForm phase_input(double X, cplx scale, double cutoff) {
  if (std::abs(X) > cutoff) return {};
  return SpectralForm::channel(X, Channel::kPhaseIn, scale);
}

}  // namespace

OutputTransfer output_quadrature_transfer(const DimensionlessParams& dp) {
  return {-1.0, -2.0 * dp.kappa};
}

SpectralForm demod_combination(const SpectralForm& upper, const SpectralForm& lower,
                               double phase) {
  return kInvSqrt2 * std::polar(1.0, phase) * upper +
         kInvSqrt2 * std::polar(1.0, -phase) * lower;
}

double output_band_limit(const ModeSet& modes, int j) {
  return std::min(modes[j].frequency, std::abs(modes.separation())) / 2.0;
}

SpectralForm modal_output_form(const ModeSet& modes, int j, double x, double phase,
                               const ModulationParams& mod, const DimensionlessParams& dp,
                               const Forcing& forcing) {
  const double limit = output_band_limit(modes, j);
  if (!(std::abs(x) < limit)) {
    throw ValidationError(fmt::format(
        "output offset |x| = {:.6g} reaches the sideband overlap limit {:.6g} of mode {}",
        std::abs(x), limit, j + 1));
  }
  const OutputTransfer io = output_quadrature_transfer(dp);
  const double w = modes[j].frequency;
  const double weight = modes[j].mode_vector(0).real();

  const SpectralForm direct =
      demod_combination(SpectralForm::channel(w + x, Channel::kPhaseIn, io.direct),
                        SpectralForm::channel(x - w, Channel::kPhaseIn, io.direct), phase);
  const auto g = quadrature_forms(modes, j, x, mod, dp, forcing);
  const SpectralForm cavity =
      io.cavity * weight * (std::cos(phase) * g[0] + kI * std::sin(phase) * g[1]);
  return direct + cavity;
}

OutputSpectrum output_psd(const ModeSet& modes, const ModulationParams& mod,
                          const std::vector<double>& grid, const DimensionlessParams& dp,
                          const Forcing& forcing, int j) {
  OutputSpectrum out;
  out.grid = grid;
  out.mode_index = j;
  out.mode_weight = modes[j].mode_vector(0).real();
  out.modulation = mod;
  ModulationParams off = mod;
  off.depth = 0.0;
  const double shot = NoiseModel::vacuum_psd();
  out.plus.resize(grid.size());
  out.minus.resize(grid.size());
  out.unmod.resize(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double x = grid[k];
    out.plus[k] = forcing.noise.psd(modal_output_form(modes, j, x, 0.0, mod, dp, forcing)) / shot;
    out.minus[k] = forcing.noise.psd(
                       modal_output_form(modes, j, x, constants::kPi / 2.0, mod, dp, forcing)) /
                   shot;
    out.unmod[k] = forcing.noise.psd(modal_output_form(modes, j, x, 0.0, off, dp, forcing)) / shot;
  }
  return out;
}

double output_psd_at_phase(const ModeSet& modes, const ModulationParams& mod, double x,
                           double phase, const DimensionlessParams& dp, const Forcing& forcing,
                           int j) {
  return forcing.noise.psd(modal_output_form(modes, j, x, phase, mod, dp, forcing)) /
         NoiseModel::vacuum_psd();
}

double single_summand_leakage(const ModeSet& modes, double x, const DimensionlessParams& dp,
                              const NoiseModel& noise, int j) {
  const double X = modes[j].frequency + x;
  const auto transfer = noise.forcing_transfer(X, dp);
  ChannelRow kept = ChannelRow::Zero();
  ChannelRow dropped = ChannelRow::Zero();
  for (int i = 0; i < 2; ++i) {
    const EigenMode& m = modes[i];
    const double weight = m.mode_vector(0).real();
    const cplx upper_pole = cplx(m.damping, -(X - m.frequency));
    const cplx lower_pole = cplx(m.damping, -(X + m.frequency));
    const ChannelRow up = weight * kI * (m.dual_vector.transpose() * transfer) /
                          (2.0 * m.frequency) / upper_pole;
    const ChannelRow down = weight * (-kI) * (m.dual_vector.adjoint() * transfer) /
                            (2.0 * m.frequency) / lower_pole;
    if (i == j) {
      kept += up;
    } else {
      dropped += up;
    }
    dropped += down;
  }
  const double kept_psd = noise.psd(SpectralForm::single(X, kept));
  if (!(kept_psd > 0.0)) throw NumericalError("single_summand_leakage: retained term vanishes");
  return noise.psd(SpectralForm::single(X, dropped)) / kept_psd;
}

SpectralForm ladder_b1_form(double X, const DimensionlessParams& dp,
                            const ModulationParams& mod, const NoiseModel& noise,
                            const LadderOptions& opts) {
  if (opts.sidebands < 0) throw ValidationError("ladder: sideband count must be >= 0");
  const int K = opts.sidebands;
  const int rungs = 2 * K + 1;
  const int n = 2 * rungs;
  const double p = mod.half_frequency;
  const Mat2c w = (Mat2c() << 0.0, dp.coupling, -dp.coupling, 0.0).finished();
  const Mat2c up = mod.depth * std::polar(1.0, mod.phase) * w;
  const Mat2c down = mod.depth * std::polar(1.0, -mod.phase) * w;

  Eigen::MatrixXcd big = Eigen::MatrixXcd::Zero(n, n);
  for (int r = 0; r < rungs; ++r) {
    const double Xk = X + 2.0 * p * (r - K);
    big.block<2, 2>(2 * r, 2 * r) = system_matrix(Xk, dp);
    if (r + 1 < rungs) big.block<2, 2>(2 * r, 2 * r + 2) = up;
    if (r > 0) big.block<2, 2>(2 * r, 2 * r - 2) = down;
  }
  // Only the b1 row of the centre rung is needed: solve the transposed system once.
  Eigen::VectorXcd e = Eigen::VectorXcd::Zero(n);
  e(2 * K) = 1.0;
  const Eigen::PartialPivLU<Eigen::MatrixXcd> lu(big.transpose());
  if (!(lu.rcond() > 1e-14)) {
    throw NumericalError(fmt::format("ladder: singular harmonic-balance system at X = {:.6g}", X));
  }
  const Eigen::VectorXcd y = lu.solve(e);

  SpectralForm form;
  for (int r = 0; r < rungs; ++r) {
    const double Xk = X + 2.0 * p * (r - K);
    if (std::abs(Xk) > opts.noise_cutoff) continue;
    const ChannelRow row = y.segment<2>(2 * r).transpose() * noise.forcing_transfer(Xk, dp);
    form.add(Xk, row);
  }
  return form;
}

SpectralForm ladder_output_form(double X, const DimensionlessParams& dp,
                                const ModulationParams& mod, const NoiseModel& noise,
                                const LadderOptions& opts) {
  const OutputTransfer io = output_quadrature_transfer(dp);
  return phase_input(X, io.direct, opts.noise_cutoff) +
         io.cavity * ladder_b1_form(X, dp, mod, noise, opts);
}

double ladder_demod_psd(double x, double demod_frequency, double phase,
                        const DimensionlessParams& dp, const ModulationParams& mod,
                        const NoiseModel& noise, const LadderOptions& opts) {
  const SpectralForm a = demod_combination(
      ladder_output_form(demod_frequency + x, dp, mod, noise, opts),
      ladder_output_form(x - demod_frequency, dp, mod, noise, opts), phase);
  return noise.psd(a) / NoiseModel::vacuum_psd();
}

OutputSpectrum ladder_output_psd(const ModeSet& modes, const ModulationParams& mod,
                                 const std::vector<double>& grid,
                                 const DimensionlessParams& dp, const NoiseModel& noise, int j,
                                 const LadderOptions& opts) {
  OutputSpectrum out;
  out.grid = grid;
  out.mode_index = j;
  out.mode_weight = modes[j].mode_vector(0).real();
  out.modulation = mod;
  ModulationParams off = mod;
  off.depth = 0.0;
  const double w = modes[j].frequency;
  const double limit = output_band_limit(modes, j);
  out.plus.resize(grid.size());
  out.minus.resize(grid.size());
  out.unmod.resize(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double x = grid[k];
    if (!(std::abs(x) < limit)) {
      throw ValidationError(fmt::format(
          "output offset |x| = {:.6g} reaches the sideband overlap limit {:.6g}", std::abs(x),
          limit));
    }
    out.plus[k] = ladder_demod_psd(x, w, 0.0, dp, mod, noise, opts);
    out.minus[k] = ladder_demod_psd(x, w, constants::kPi / 2.0, dp, mod, noise, opts);
    out.unmod[k] = ladder_demod_psd(x, w, 0.0, dp, off, noise, opts);
  }
  return out;
}

}  // namespace optomode
