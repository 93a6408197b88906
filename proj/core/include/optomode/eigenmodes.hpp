#pragma once

// Optomechanical eigenmodes of the two-degree-of-freedom system.
//
// The coupled system is not self-adjoint, so mode vectors are not mutually
// orthogonal. Two pairings appear and both are kept exactly:
//   bilinear(P, v)   = sum_k P_k v_k        (defines the dual basis)
//   conj_pairing(P, w) = sum_k conj(P_k) w_k  (appears in the modulation terms)

#include <array>

#include "optomode/model.hpp"

namespace optomode {

struct EigenMode {
  cplx root;                   // s = omega - i gamma
  double frequency = 0.0;      // omega = Re s
  double damping = 0.0;        // gamma = -Im s
  Vec2c mode_vector;           // v, unit norm, first component real >= 0
  Vec2c dual_vector;           // Pi, bilinear(Pi_j, v_i) = delta_ji
  Vec2c coupling_vector;       // w = [[0, A], [-A, 0]] v
  bool second_component_normalized = false;

  double quality_factor() const { return frequency / (2.0 * damping); }
};

struct ModeSet {
  std::array<EigenMode, 2> modes;  // ascending frequency
  std::array<cplx, 4> roots;       // all characteristic roots, ascending Re s
  bool stable = false;             // every root has Im s <= 0
  bool degenerate = false;         // two roots within 1e-6 (double resonance)
  Warnings warnings;

  const EigenMode& operator[](int j) const { return modes.at(static_cast<std::size_t>(j)); }
  double separation() const { return modes[1].frequency - modes[0].frequency; }
  double max_damping() const;
  double min_damping() const;
};

cplx bilinear(const Vec2c& a, const Vec2c& b);
cplx conj_pairing(const Vec2c& a, const Vec2c& b);

/// All four roots of det M(x) = 0 from the eigenvalues of the companion
/// matrix, ordered by ascending real part, ties by ascending damping.
std::array<cplx, 4> characteristic_roots(const DimensionlessParams& dp);

/// True when two roots coincide to within `tol`.
bool roots_degenerate(const std::array<cplx, 4>& roots, double tol = 1e-6);

struct ModeVector {
  Vec2c v;
  bool second_component_normalized = false;
};

/// Unit null vector of M(s). Throws NumericalError if s is not a root.
ModeVector mode_vector(cplx root, const DimensionlessParams& dp);

/// Rows of [v1 v2]^-1. Throws NumericalError when the vectors are nearly
/// collinear (condition number above 1e8).
std::array<Vec2c, 2> dual_basis(const Vec2c& v1, const Vec2c& v2);

Vec2c coupling_w(const Vec2c& v, const DimensionlessParams& dp);

/// Retains the two roots with positive frequency and builds their vectors.
/// Refuses (NumericalError) at double resonance, where the dual basis does
/// not exist.
ModeSet find_modes(const DimensionlessParams& dp);

/// eps_ji = -i |m| conj_pairing(Pi_j, w_i) e^{i phi} / (2 omega_j).
Mat2c epsilon_matrix(const ModeSet& modes, const ModulationParams& mod);

/// Depth at which |eps_jj| reaches gamma_j: m_c = 2 omega_j gamma_j / |conj_pairing(Pi_j, w_j)|.
std::array<double, 2> critical_modulation(const ModeSet& modes);

/// Modulation phase that makes eps_jj real and positive.
double phase_for_real_epsilon(const ModeSet& modes, int j = 0);

/// Modulation at half-frequency omega_j, phase making eps_jj real positive,
/// depth given as a fraction of m_c of mode j.
ModulationParams resonant_modulation(const ModeSet& modes, double depth_fraction, int j = 0);

}  // namespace optomode
