#pragma once

// Cavity description in SI and dimensionless form, the spectral system
// matrix of the coupled optical/mechanical equations, and the closure that
// recovers the optical relaxation rate and detuning from detector data.

#include "optomode/types.hpp"

namespace optomode {

namespace constants {
inline constexpr double kSpeedOfLight = 299792458.0;     // m/s
inline constexpr double kHbar = 1.054571817e-34;         // J s
inline constexpr double kBoltzmann = 1.380649e-23;       // J/K
inline constexpr double kPi = 3.14159265358979323846;
}  // namespace constants

/// Equivalent single-cavity description in SI units.
///
/// `circulating_power` is the power of the equivalent cavity, i.e. already
/// twice the per-arm power of a Michelson detector. The feedback force on
/// the mirror is -mu * feedback_gain * d(a2_out)/dt.
struct PhysicalParams {
  double arm_length = 0.0;         // L, m
  double reduced_mass = 0.0;       // mu, kg
  double circulating_power = 0.0;  // P, W
  double wavelength = 0.0;         // lambda, m
  double relaxation_rate = 0.0;    // Gamma, 1/s
  double detuning = 0.0;           // Delta, rad/s (> 0: blue-detuned pump)
  double feedback_gain = 0.0;      // alpha_fb, 1/s

  double one_way_time() const { return arm_length / constants::kSpeedOfLight; }
  double pump_frequency() const {
    return 2.0 * constants::kPi * constants::kSpeedOfLight / wavelength;
  }

  void validate() const;
};

struct DimensionlessParams {
  double coupling = 0.0;         // A
  double optical_damping = 0.0;  // g, in (0, 2*sqrt(2))
  double feedback = 0.0;         // alpha
  // sqrt(Gamma * tau). Every shot-noise normalized output is independent of it.
  double kappa = 1.0;

  void validate() const;
};

/// Pump-power modulation A -> A (1 + 2|m| cos(2 p t + phi)).
struct ModulationParams {
  double depth = 0.0;           // |m|
  double phase = 0.0;           // phi, rad
  double half_frequency = 0.0;  // p, dimensionless; the pump is modulated at 2p

  void validate() const;
};

/// Reference parameter set (A = 0.90, g = 0.1, alpha = 0.1).
DimensionlessParams reference_params();

DimensionlessParams to_dimensionless(const PhysicalParams& phys);

/// Conversion between dimensionless spectral frequency x and angular
/// frequency Omega: x = sqrt(2) Omega / sqrt(Gamma^2 + Delta^2).
double to_angular_frequency(double x, double relaxation_rate, double detuning);
double to_hertz(double x, double relaxation_rate, double detuning);

struct ClosureResult {
  double relaxation_rate = 0.0;  // Gamma, 1/s
  double detuning = 0.0;         // Delta, rad/s
  double residual = 0.0;         // max relative residual on (A, g)
  int iterations = 0;
};

/// Finds (Gamma, Delta) such that `to_dimensionless` reproduces the requested
/// coupling and optical damping. Gamma is eliminated analytically through g;
/// the remaining scalar equation A(Delta) = A_target is monotone and solved by
/// bisection in log(Delta). Throws NumericalError if the residual does not
/// reach 1e-10 within the iteration budget.
ClosureResult close_parameters(double arm_length, double reduced_mass,
                               double circulating_power, double wavelength,
                               double coupling_target, double damping_target);

/// alpha_fb that realizes a dimensionless feedback coefficient for given rates.
double feedback_gain_for(double feedback, double reduced_mass,
                         double relaxation_rate, double detuning);

/// M(x) acting on (b1, z): M(x) (b1, z)^T = (nu1, nu2)^T.
Mat2c system_matrix(cplx x, const DimensionlessParams& dp);
inline Mat2c system_matrix(double x, const DimensionlessParams& dp) {
  return system_matrix(cplx{x, 0.0}, dp);
}

/// det M(x) = x^4 + i g x^3 - 2 x^2 - i A alpha x + A^2.
cplx characteristic_polynomial(cplx x, const DimensionlessParams& dp);

}  // namespace optomode
