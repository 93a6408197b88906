#include "optomode/model.hpp"

#include <cmath>

#include <fmt/core.h>

#include "optomode/errors.hpp"

namespace optomode {

namespace {

constexpr double kMaxDampingRatio = 2.0 * 1.4142135623730951;  // 2 sqrt(2)
constexpr double kClosureTolerance = 1e-10;
constexpr int kClosureBudget = 400;

void require_positive(double value, const char* name) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw ValidationError(fmt::format("{} must be positive and finite (got {})", name, value));
  }
}

double coupling_for_detuning(double detuning, double q, double arm_length,
                             double reduced_mass, double power, double pump_frequency) {
  const double relaxation = detuning * q / std::sqrt(1.0 - q * q);
  const double sum = relaxation * relaxation + detuning * detuning;
  return 2.0 / sum *
         std::sqrt(2.0 * power * pump_frequency * detuning /
                   (reduced_mass * arm_length * constants::kSpeedOfLight));
}

}  // namespace

void PhysicalParams::validate() const {
  require_positive(arm_length, "arm_length");
  require_positive(reduced_mass, "reduced_mass");
  require_positive(circulating_power, "circulating_power");
  require_positive(wavelength, "wavelength");
  require_positive(relaxation_rate, "relaxation_rate");
  if (!(detuning > 0.0) || !std::isfinite(detuning)) {
    throw ValidationError(fmt::format(
        "detuning must be positive (blue-detuned pump gives the optical spring "
        "sign used here); got {}",
        detuning));
  }
  if (!(feedback_gain >= 0.0) || !std::isfinite(feedback_gain)) {
    throw ValidationError("feedback_gain must be non-negative and finite");
  }
}

void DimensionlessParams::validate() const {
  require_positive(coupling, "coupling A");
  if (!(optical_damping > 0.0 && optical_damping < kMaxDampingRatio)) {
    throw ValidationError(fmt::format(
        "optical damping g must lie in (0, 2*sqrt(2)); got {}", optical_damping));
  }
  if (!(feedback >= 0.0) || !std::isfinite(feedback)) {
    throw ValidationError("feedback alpha must be non-negative and finite");
  }
  require_positive(kappa, "kappa");
}

void ModulationParams::validate() const {
  if (!(depth >= 0.0) || !std::isfinite(depth)) {
    throw ValidationError("modulation depth |m| must be non-negative and finite");
  }
  if (!std::isfinite(phase) || !std::isfinite(half_frequency)) {
    throw ValidationError("modulation phase and frequency must be finite");
  }
}

DimensionlessParams reference_params() { return {0.90, 0.1, 0.1, 1.0}; }

DimensionlessParams to_dimensionless(const PhysicalParams& phys) {
  phys.validate();
  const double gamma = phys.relaxation_rate;
  const double delta = phys.detuning;
  const double norm = std::sqrt(gamma * gamma + delta * delta);

  DimensionlessParams dp;
  dp.optical_damping = 2.0 * std::sqrt(2.0) * gamma / norm;
  dp.coupling = 2.0 / (norm * norm) *
                std::sqrt(2.0 * phys.circulating_power * phys.pump_frequency() * delta /
                          (phys.reduced_mass * phys.arm_length * constants::kSpeedOfLight));
  dp.feedback = 2.0 * phys.feedback_gain / norm *
                std::sqrt(phys.reduced_mass * delta * gamma / constants::kHbar);
  dp.kappa = std::sqrt(gamma * phys.one_way_time());

  if (!std::isfinite(dp.optical_damping) || !std::isfinite(dp.coupling) ||
      !std::isfinite(dp.feedback) || !std::isfinite(dp.kappa)) {
    throw ValidationError("dimensionless conversion produced a non-finite value");
  }
  return dp;
}

double to_angular_frequency(double x, double relaxation_rate, double detuning) {
  return x * std::sqrt(relaxation_rate * relaxation_rate + detuning * detuning) / std::sqrt(2.0);
}

double to_hertz(double x, double relaxation_rate, double detuning) {
  return to_angular_frequency(x, relaxation_rate, detuning) / (2.0 * constants::kPi);
}

ClosureResult close_parameters(double arm_length, double reduced_mass,
                               double circulating_power, double wavelength,
                               double coupling_target, double damping_target) {
  require_positive(arm_length, "arm_length");
  require_positive(reduced_mass, "reduced_mass");
  require_positive(circulating_power, "circulating_power");
  require_positive(wavelength, "wavelength");
  require_positive(coupling_target, "coupling target");
  if (!(damping_target > 0.0 && damping_target < kMaxDampingRatio)) {
    throw ValidationError(fmt::format(
        "damping target g must lie in (0, 2*sqrt(2)); got {}", damping_target));
  }

  const double q = damping_target / kMaxDampingRatio;
  const double pump = 2.0 * constants::kPi * constants::kSpeedOfLight / wavelength;
  auto coupling_at = [&](double log_delta) {
    return coupling_for_detuning(std::exp(log_delta), q, arm_length, reduced_mass,
                                 circulating_power, pump);
  };

  // A(Delta) ~ Delta^(-3/2): strictly decreasing, so a wide log bracket suffices.
  double lo = std::log(1e-12);
  double hi = std::log(1e24);
  if (!(coupling_at(lo) > coupling_target && coupling_at(hi) < coupling_target)) {
    throw NumericalError("close_parameters: target coupling is not bracketed");
  }

  ClosureResult result;
  for (int it = 0; it < kClosureBudget; ++it) {
    const double mid = 0.5 * (lo + hi);
    (coupling_at(mid) > coupling_target ? lo : hi) = mid;
    result.iterations = it + 1;
    if (hi - lo < 1e-15) break;
  }

  result.detuning = std::exp(0.5 * (lo + hi));
  result.relaxation_rate = result.detuning * q / std::sqrt(1.0 - q * q);

  PhysicalParams check;
  check.arm_length = arm_length;
  check.reduced_mass = reduced_mass;
  check.circulating_power = circulating_power;
  check.wavelength = wavelength;
  check.relaxation_rate = result.relaxation_rate;
  check.detuning = result.detuning;
  const DimensionlessParams back = to_dimensionless(check);
  result.residual =
      std::max(std::abs(back.coupling - coupling_target) / coupling_target,
               std::abs(back.optical_damping - damping_target) / damping_target);
  if (!(result.residual <= kClosureTolerance)) {
    throw NumericalError(fmt::format(
        "close_parameters: residual {:.3e} above tolerance after {} iterations",
        result.residual, result.iterations));
  }
  return result;
}

double feedback_gain_for(double feedback, double reduced_mass, double relaxation_rate,
                         double detuning) {
  const double norm = std::sqrt(relaxation_rate * relaxation_rate + detuning * detuning);
  return feedback * norm /
         (2.0 * std::sqrt(reduced_mass * detuning * relaxation_rate / constants::kHbar));
}

Mat2c system_matrix(cplx x, const DimensionlessParams& dp) {
  const double A = dp.coupling;
  Mat2c m;
  m(0, 0) = -x * x - kI * x * dp.optical_damping + 2.0;
  m(0, 1) = A;
  m(1, 0) = -A + kI * x * dp.feedback;
  m(1, 1) = -x * x;
  return m;
}

cplx characteristic_polynomial(cplx x, const DimensionlessParams& dp) {
  const double A = dp.coupling;
  // Horner form of x^4 + i g x^3 - 2 x^2 - i A alpha x + A^2.
  return (((x + kI * dp.optical_damping) * x - 2.0) * x - kI * A * dp.feedback) * x + A * A;
}

}  // namespace optomode
