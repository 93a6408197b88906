#pragma once

#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace optomode {

using cplx = std::complex<double>;
using Vec2c = Eigen::Matrix<cplx, 2, 1>;
using Mat2c = Eigen::Matrix<cplx, 2, 2>;

inline constexpr cplx kI{0.0, 1.0};

// Non-fatal diagnostics collected by operations that have soft preconditions.
using Warnings = std::vector<std::string>;

}  // namespace optomode
