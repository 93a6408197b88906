#include "optomode/spectral.hpp"

#include <cmath>
#include <limits>

#include <Eigen/LU>
#include <fmt/core.h>

#include "optomode/errors.hpp"

namespace optomode {

namespace {

constexpr double kSlowValidity = 0.1;
constexpr double kSeparationRatio = 10.0;
constexpr double kSingularRcond = 1e-13;
const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

void check_regime(const ModeSet& modes, const Mat2c& eps, Warnings& warnings) {
  const double sep = std::abs(modes.separation());
  if (sep < kSeparationRatio * modes.max_damping()) {
    warnings.push_back(fmt::format(
        "mode separation {:.4g} is below {} x max damping {:.4g}; modes are not isolated",
        sep, kSeparationRatio, modes.max_damping()));
  }
  for (int j = 0; j < 2; ++j) {
    const double rate = std::max(modes[j].damping, std::abs(eps(j, j)));
    const double ratio = rate / modes[j].frequency;
    if (ratio > kSlowValidity) {
      warnings.push_back(fmt::format(
          "slow-amplitude approximation strained for mode {}: max(gamma, |eps|)/omega = {:.3g}",
          j + 1, ratio));
    }
  }
}

}  // namespace

std::vector<double> linear_grid(double lo, double hi, std::size_t points) {
  if (points < 2 || !(hi > lo)) {
    throw ValidationError("linear_grid: need at least two points and hi > lo");
  }
  std::vector<double> grid(points);
  const double step = (hi - lo) / static_cast<double>(points - 1);
  for (std::size_t i = 0; i < points; ++i) grid[i] = lo + step * static_cast<double>(i);
  grid.back() = hi;
  return grid;
}

std::vector<double> default_grid(const ModeSet& modes) {
  const double half = 10.0 * modes[0].damping;
  return linear_grid(-half, half, 2001);
}

SpectralForm modal_forcing_form(const ModeSet& modes, int slot, double x,
                                const ModulationParams& mod, const DimensionlessParams& dp,
                                const Forcing& forcing) {
  const int j = slot / 2;
  const bool conjugate = slot % 2 == 1;
  const EigenMode& mode = modes[j];
  const double p = mod.half_frequency;

  const double absolute = conjugate ? x - p : x + p;
  const double line = conjugate ? -mode.frequency : mode.frequency;
  if (forcing.gate_factor && std::abs(absolute - line) > *forcing.gate_factor * mode.damping) {
    return {};
  }

  const double eval = forcing.narrowband ? line : absolute;
  const auto transfer = forcing.noise.forcing_transfer(eval, dp);
  ChannelRow row;
  if (conjugate) {
    row = -kI * mode.dual_vector.adjoint() * transfer / (2.0 * mode.frequency);
  } else {
    row = kI * mode.dual_vector.transpose() * transfer / (2.0 * mode.frequency);
  }
  if (forcing.narrowband) {
    const ChannelPsd at_line = forcing.noise.channel_psd(line);
    const ChannelPsd here = forcing.noise.channel_psd(absolute);
    for (int c = 0; c < kNoiseChannels; ++c) {
      const auto k = static_cast<std::size_t>(c);
      row(c) = here[k] > 0.0 ? row(c) * std::sqrt(at_line[k] / here[k]) : cplx{0.0};
      if (here[k] == 0.0 && at_line[k] > 0.0) {
        throw NumericalError("narrowband forcing: channel density vanishes off the line");
      }
    }
  }
  return SpectralForm::single(absolute, row);
}

QuadratureSpectrum decoupled_psd(const ModeSet& modes, const ModulationParams& mod,
                                 const std::vector<double>& grid,
                                 const DimensionlessParams& dp, const Forcing& forcing, int j,
                                 Branch branch) {
  const Mat2c eps = epsilon_matrix(modes, mod);
  QuadratureSpectrum out;
  out.grid = grid;
  out.mode_index = j;
  out.modulation = mod;
  check_regime(modes, eps, out.warnings);

  const cplx e = eps(j, j);
  const double mag = std::abs(e);
  const double gamma = modes[j].damping;
  if (mag > 0.0 && std::abs(e.imag()) > 1e-9 * mag) {
    out.warnings.push_back(
        "eps_jj is not real; plus/minus refer to quadratures rotated by arg(eps_jj)/2");
  }
  if (branch != Branch::kPlus && mag >= gamma) {
    throw InstabilityError(
        fmt::format("modulation |eps| = {:.6g} reaches the damping {:.6g} of mode {}; the "
                    "minus quadrature is unstable",
                    mag, gamma, j + 1),
        j + 1, "minus");
  }

  // Isolated mode: the solver frequency is the offset from its own line.
  ModulationParams centred = mod;
  centred.half_frequency = modes[j].frequency;

  out.plus.resize(grid.size());
  out.minus.resize(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double x = grid[k];
    const double fu = forcing.noise.psd(modal_forcing_form(modes, 2 * j, x, centred, dp, forcing));
    const double fc =
        forcing.noise.psd(modal_forcing_form(modes, 2 * j + 1, x, centred, dp, forcing));
    const double sf = 0.5 * (fu + fc);
    const double x2 = x * x;
    out.plus[k] = branch == Branch::kMinus ? 0.0 : sf / ((gamma + mag) * (gamma + mag) + x2);
    out.minus[k] = branch == Branch::kPlus ? 0.0 : sf / ((gamma - mag) * (gamma - mag) + x2);
  }
  return out;
}

CoupledSolution coupled_solve(double x, const ModeSet& modes, const ModulationParams& mod) {
  const Mat2c eps = epsilon_matrix(modes, mod);
  const double p = mod.half_frequency;
  CoupledSolution sol;
  sol.system.setZero();
  for (int j = 0; j < 2; ++j) {
    const double detune = modes[j].frequency - p;
    sol.system(2 * j, 2 * j) = cplx(modes[j].damping, -(x - detune));
    sol.system(2 * j + 1, 2 * j + 1) = cplx(modes[j].damping, -(x + detune));
    for (int i = 0; i < 2; ++i) {
      sol.system(2 * j, 2 * i + 1) = std::conj(eps(j, i));
      sol.system(2 * j + 1, 2 * i) = eps(j, i);
    }
  }
  const Eigen::PartialPivLU<Eigen::Matrix4cd> lu(sol.system);
  sol.rcond = lu.rcond();
  if (!(sol.rcond > kSingularRcond)) {
    throw NumericalError(fmt::format(
        "coupled_solve: singular amplitude system at x = {:.6g} (rcond {:.3e}); the "
        "parametric threshold is reached",
        x, sol.rcond));
  }
  sol.transfer = lu.inverse();
  return sol;
}

std::array<SpectralForm, 2> quadrature_forms(const ModeSet& modes, int j, double x,
                                             const ModulationParams& mod,
                                             const DimensionlessParams& dp,
                                             const Forcing& forcing) {
  const double detune = modes[j].frequency - mod.half_frequency;
  auto response = [&](int slot, double xs) {
    const CoupledSolution sol = coupled_solve(xs, modes, mod);
    SpectralForm form;
    for (int k = 0; k < 4; ++k) {
      const cplx h = sol.transfer(slot, k);
      if (h == 0.0) continue;
      form += h * modal_forcing_form(modes, k, xs, mod, dp, forcing);
    }
    return form;
  };
  const SpectralForm amp = response(2 * j, x + detune);
  const SpectralForm conj_amp = response(2 * j + 1, x - detune);
  return {kInvSqrt2 * (amp + conj_amp), kInvSqrt2 * (amp - conj_amp)};
}

std::array<QuadratureSpectrum, 2> quadrature_psd(const ModeSet& modes,
                                                 const ModulationParams& mod,
                                                 const std::vector<double>& grid,
                                                 const DimensionlessParams& dp,
                                                 const Forcing& forcing) {
  const Mat2c eps = epsilon_matrix(modes, mod);
  std::array<QuadratureSpectrum, 2> out;
  for (int j = 0; j < 2; ++j) {
    QuadratureSpectrum& s = out[static_cast<std::size_t>(j)];
    s.grid = grid;
    s.mode_index = j;
    s.modulation = mod;
    if (j == 0) check_regime(modes, eps, s.warnings);
    s.plus.resize(grid.size());
    s.minus.resize(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) {
      const auto forms = quadrature_forms(modes, j, grid[k], mod, dp, forcing);
      s.plus[k] = std::max(0.0, forcing.noise.psd(forms[0]));
      s.minus[k] = std::max(0.0, forcing.noise.psd(forms[1]));
    }
  }
  return out;
}

double integrated_variance(const std::vector<double>& grid, const std::vector<double>& psd) {
  if (grid.size() != psd.size() || grid.size() < 2) {
    throw ValidationError("integrated_variance: grid and PSD sizes differ or are too small");
  }
  double sum = 0.0;
  for (std::size_t k = 1; k < grid.size(); ++k) {
    sum += 0.5 * (psd[k] + psd[k - 1]) * (grid[k] - grid[k - 1]);
  }
  return sum / (2.0 * constants::kPi);
}

LineVariance line_variance(const ModeSet& modes, const ModulationParams& mod,
                           const DimensionlessParams& dp, const Forcing& forcing, int j,
                           SolverPath path, int nodes) {
  if (!forcing.narrowband && !forcing.gate_factor) {
    throw ValidationError("line_variance: forcing must be narrowband or gated");
  }
  if (nodes < 16) throw ValidationError("line_variance: too few nodes");
  const double gamma = modes[j].damping;
  const double mag = std::abs(epsilon_matrix(modes, mod)(j, j));
  ModulationParams centred = mod;
  centred.half_frequency = modes[j].frequency;

  const double h = constants::kPi / nodes;
  LineVariance v;
  for (int k = 0; k < nodes; ++k) {
    const double theta = -constants::kPi / 2.0 + (k + 0.5) * h;
    const double c = std::cos(theta);
    const double x = gamma * std::tan(theta);
    const double weight = gamma / (c * c) * h;
    if (path == SolverPath::kCoupled) {
      const auto forms = quadrature_forms(modes, j, x, mod, dp, forcing);
      v.plus += forcing.noise.psd(forms[0]) * weight;
      v.minus += forcing.noise.psd(forms[1]) * weight;
    } else {
      const double sf =
          0.5 * (forcing.noise.psd(modal_forcing_form(modes, 2 * j, x, centred, dp, forcing)) +
                 forcing.noise.psd(modal_forcing_form(modes, 2 * j + 1, x, centred, dp, forcing)));
      v.plus += sf / ((gamma + mag) * (gamma + mag) + x * x) * weight;
      v.minus += sf / ((gamma - mag) * (gamma - mag) + x * x) * weight;
    }
  }
  v.plus /= 2.0 * constants::kPi;
  v.minus /= 2.0 * constants::kPi;
  if (path == SolverPath::kDecoupled && mag >= gamma) {
    v.minus = std::numeric_limits<double>::infinity();
  }
  return v;
}

}  // namespace optomode
