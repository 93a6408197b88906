#pragma once

#include <cmath>
#include <complex>

#include "optomode/model.hpp"

namespace optomode::test {

// Reference set A = 0.9, g = 0.1, alpha = 0.1 and its published modal data.
inline constexpr double kOmega1 = 0.7518498224445276;
inline constexpr double kGamma1 = 0.01929691001083014;
inline constexpr double kOmega2 = 1.196259543310306;
inline constexpr double kGamma2 = 0.0307030899891699;
inline constexpr double kCriticalDepth = 0.01546964815090726;
inline constexpr double kRealEpsilonPhase = 1.54618026287283;

// Well separated set: |omega2 - omega1| / max gamma above 70.
inline DimensionlessParams separated_params() { return {0.9, 0.02, 0.02, 1.0}; }

inline double rel_diff(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

// Expanded determinant of the 2x2 system matrix, written out independently.
inline std::complex<double> expanded_determinant(std::complex<double> x, double A, double g,
                                                 double alpha) {
  const std::complex<double> i{0.0, 1.0};
  return x * x * x * x + i * g * x * x * x - 2.0 * x * x - i * A * alpha * x + A * A;
}

}  // namespace optomode::test
