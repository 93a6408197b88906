#include "optomode/eigenmodes.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <fmt/core.h>

#include "optomode/errors.hpp"

namespace optomode {

namespace {

constexpr double kRootResidual = 1e-8;
constexpr double kMaxCondition = 1e8;

bool root_less(const cplx& a, const cplx& b) {
  if (a.real() != b.real()) return a.real() < b.real();
  return -a.imag() < -b.imag();
}

}  // namespace

double ModeSet::max_damping() const { return std::max(modes[0].damping, modes[1].damping); }
double ModeSet::min_damping() const { return std::min(modes[0].damping, modes[1].damping); }

cplx bilinear(const Vec2c& a, const Vec2c& b) { return a(0) * b(0) + a(1) * b(1); }

cplx conj_pairing(const Vec2c& a, const Vec2c& b) {
  return std::conj(a(0)) * b(0) + std::conj(a(1)) * b(1);
}

std::array<cplx, 4> characteristic_roots(const DimensionlessParams& dp) {
  const double A = dp.coupling;
  // Monic p(x) = x^4 + c3 x^3 + c2 x^2 + c1 x + c0.
  const cplx c3 = kI * dp.optical_damping;
  const cplx c2 = -2.0;
  const cplx c1 = -kI * A * dp.feedback;
  const cplx c0 = A * A;

  Eigen::Matrix4cd companion = Eigen::Matrix4cd::Zero();
  companion(1, 0) = 1.0;
  companion(2, 1) = 1.0;
  companion(3, 2) = 1.0;
  companion(0, 3) = -c0;
  companion(1, 3) = -c1;
  companion(2, 3) = -c2;
  companion(3, 3) = -c3;

  Eigen::ComplexEigenSolver<Eigen::Matrix4cd> solver(companion, false);
  if (solver.info() != Eigen::Success) {
    throw NumericalError("characteristic_roots: companion eigenvalue solver failed");
  }
  std::array<cplx, 4> roots;
  for (int k = 0; k < 4; ++k) roots[static_cast<std::size_t>(k)] = solver.eigenvalues()(k);
  std::sort(roots.begin(), roots.end(), root_less);
  return roots;
}

bool roots_degenerate(const std::array<cplx, 4>& roots, double tol) {
  for (std::size_t i = 0; i < roots.size(); ++i) {
    for (std::size_t k = i + 1; k < roots.size(); ++k) {
      if (std::abs(roots[i] - roots[k]) < tol) return true;
    }
  }
  return false;
}

ModeVector mode_vector(cplx root, const DimensionlessParams& dp) {
  const Mat2c m = system_matrix(root, dp);
  const double scale = std::max(1.0, std::pow(std::abs(root), 4));
  if (std::abs(m.determinant()) > kRootResidual * scale) {
    throw NumericalError(fmt::format(
        "mode_vector: ({}, {}) is not a characteristic root (|det M| = {:.3e})",
        root.real(), root.imag(), std::abs(m.determinant())));
  }

  // Null vector from whichever row carries more weight: (b, -a) annihilates row (a, b).
  Vec2c v;
  if (m.row(0).norm() >= m.row(1).norm()) {
    v << m(0, 1), -m(0, 0);
  } else {
    v << m(1, 1), -m(1, 0);
  }
  if (v.norm() == 0.0) {
    // M(s) vanishes identically: any vector is null; pick the first axis.
    v << 1.0, 0.0;
  }
  v /= v.norm();

  ModeVector out;
  if (std::abs(v(0)) >= 1e-12) {
    v *= std::polar(1.0, -std::arg(v(0)));
    v(0) = cplx{v(0).real(), 0.0};
  } else {
    v *= std::polar(1.0, -std::arg(v(1)));
    v(0) = 0.0;
    v(1) = cplx{std::abs(v(1)), 0.0};
    out.second_component_normalized = true;
  }
  out.v = v;
  return out;
}

std::array<Vec2c, 2> dual_basis(const Vec2c& v1, const Vec2c& v2) {
  Mat2c basis;
  basis.col(0) = v1;
  basis.col(1) = v2;
  const Eigen::JacobiSVD<Mat2c> svd(basis);
  const auto& sv = svd.singularValues();
  const double cond = sv(1) > 0.0 ? sv(0) / sv(1) : INFINITY;
  if (!(cond <= kMaxCondition)) {
    throw NumericalError(fmt::format(
        "dual_basis: mode vectors are nearly collinear (condition number {:.3e}); "
        "double resonance has no dual basis",
        cond));
  }
  const Mat2c inv = basis.inverse();
  return {Vec2c(inv.row(0).transpose()), Vec2c(inv.row(1).transpose())};
}

Vec2c coupling_w(const Vec2c& v, const DimensionlessParams& dp) {
  return Vec2c(dp.coupling * v(1), -dp.coupling * v(0));
}

ModeSet find_modes(const DimensionlessParams& dp) {
  dp.validate();
  ModeSet set;
  set.roots = characteristic_roots(dp);
  set.stable = std::all_of(set.roots.begin(), set.roots.end(),
                           [](const cplx& s) { return s.imag() <= 0.0; });
  set.degenerate = roots_degenerate(set.roots);
  if (set.degenerate) {
    set.warnings.emplace_back(
        "characteristic roots coincide within 1e-6 (double resonance)");
  }

  std::vector<cplx> positive;
  for (const cplx& s : set.roots) {
    if (s.real() > 0.0) positive.push_back(s);
  }
  if (positive.size() != 2) {
    throw NumericalError(fmt::format(
        "find_modes: expected two positive-frequency roots, found {}", positive.size()));
  }

  for (std::size_t j = 0; j < 2; ++j) {
    EigenMode& mode = set.modes[j];
    mode.root = positive[j];
    mode.frequency = mode.root.real();
    mode.damping = -mode.root.imag();
    const ModeVector mv = mode_vector(mode.root, dp);
    mode.mode_vector = mv.v;
    mode.second_component_normalized = mv.second_component_normalized;
    mode.coupling_vector = coupling_w(mv.v, dp);
  }
  const auto duals = dual_basis(set.modes[0].mode_vector, set.modes[1].mode_vector);
  set.modes[0].dual_vector = duals[0];
  set.modes[1].dual_vector = duals[1];
  return set;
}

Mat2c epsilon_matrix(const ModeSet& modes, const ModulationParams& mod) {
  mod.validate();
  Mat2c eps;
  const cplx phase = std::polar(1.0, mod.phase);
  for (int j = 0; j < 2; ++j) {
    const EigenMode& mj = modes[j];
    if (mj.frequency == 0.0) throw NumericalError("epsilon_matrix: zero eigenfrequency");
    for (int i = 0; i < 2; ++i) {
      eps(j, i) = -kI * mod.depth * conj_pairing(mj.dual_vector, modes[i].coupling_vector) *
                  phase / (2.0 * mj.frequency);
    }
  }
  return eps;
}

std::array<double, 2> critical_modulation(const ModeSet& modes) {
  std::array<double, 2> mc{};
  for (int j = 0; j < 2; ++j) {
    const EigenMode& mj = modes[j];
    const double proj = std::abs(conj_pairing(mj.dual_vector, mj.coupling_vector));
    if (!(proj > 0.0)) {
      throw NumericalError(fmt::format(
          "critical_modulation: coupling projection of mode {} vanishes", j + 1));
    }
    mc[static_cast<std::size_t>(j)] = 2.0 * mj.frequency * mj.damping / proj;
  }
  return mc;
}

double phase_for_real_epsilon(const ModeSet& modes, int j) {
  const EigenMode& mj = modes[j];
  return -std::arg(-kI * conj_pairing(mj.dual_vector, mj.coupling_vector));
}

ModulationParams resonant_modulation(const ModeSet& modes, double depth_fraction, int j) {
  ModulationParams mod;
  mod.depth = depth_fraction * critical_modulation(modes)[static_cast<std::size_t>(j)];
  mod.phase = phase_for_real_epsilon(modes, j);
  mod.half_frequency = modes[j].frequency;
  return mod;
}

}  // namespace optomode
