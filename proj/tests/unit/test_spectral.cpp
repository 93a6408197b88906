#include <doctest.h>

#include <cmath>

#include "optomode/eigenmodes.hpp"
#include "optomode/errors.hpp"
#include "optomode/spectral.hpp"
#include "reference.hpp"

using namespace optomode;

TEST_CASE("without modulation both quadratures have equal spectra") {
  const DimensionlessParams dp = reference_params();
  const ModeSet modes = find_modes(dp);
  const auto grid = default_grid(modes);
  CHECK(grid.size() == 2001);
  CHECK(grid.front() == doctest::Approx(-10.0 * modes[0].damping));
  const auto spectra = quadrature_psd(modes, resonant_modulation(modes, 0.0), grid, dp);
  for (const auto& s : spectra) {
    for (std::size_t i = 0; i < grid.size(); ++i) {
      CHECK(test::rel_diff(s.plus[i], s.minus[i]) <= 1e-10);
    }
  }
}

TEST_CASE("coupled system reduces to independent Lorentzian responses without modulation") {
  const ModeSet modes = find_modes(reference_params());
  const ModulationParams mod = resonant_modulation(modes, 0.0);
  for (double x : {-0.1, 0.0, 0.02}) {
    const CoupledSolution sol = coupled_solve(x, modes, mod);
    const cplx g1 = modes[0].damping - kI * x;
    const cplx g2 = modes[1].damping - kI * (x - (modes[1].frequency - modes[0].frequency));
    CHECK(std::abs(sol.transfer(0, 0) - 1.0 / g1) <= 1e-12 * std::abs(1.0 / g1));
    CHECK(std::abs(sol.transfer(2, 2) - 1.0 / g2) <= 1e-12 * std::abs(1.0 / g2));
    CHECK(std::abs(sol.transfer(0, 2)) == 0.0);
  }
}

TEST_CASE("coupled solve satisfies the linear system") {
  const ModeSet modes = find_modes(reference_params());
  const ModulationParams mod = resonant_modulation(modes, 0.8);
  for (double x : {-0.05, 0.0, 0.013}) {
    const CoupledSolution sol = coupled_solve(x, modes, mod);
    const Eigen::Vector4cd rhs(cplx(0.3, -1.0), cplx(2.0, 0.1), cplx(-0.7, 0.4), cplx(0.0, 1.5));
    const Eigen::Vector4cd q = sol.transfer * rhs;
    CHECK((sol.system * q - rhs).norm() <= 1e-10);
    CHECK(sol.rcond > 1e-13);
  }
}

TEST_CASE("decoupled spectra follow the closed-form Lorentzians") {
  const DimensionlessParams dp = reference_params();
  const ModeSet modes = find_modes(dp);
  const double gamma = modes[0].damping;
  Forcing narrow;
  narrow.narrowband = true;
  const auto grid = linear_grid(-5.0 * gamma, 5.0 * gamma, 101);
  const auto base = decoupled_psd(modes, resonant_modulation(modes, 0.0), grid, dp, narrow);
  for (double f : {0.3, 0.6}) {
    const ModulationParams mod = resonant_modulation(modes, f);
    const double eps = std::abs(epsilon_matrix(modes, mod)(0, 0));
    CHECK(eps == doctest::Approx(f * gamma).epsilon(1e-12));
    const auto s = decoupled_psd(modes, mod, grid, dp, narrow);
    const double sf = base.plus[50] * gamma * gamma;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double x = grid[i];
      CHECK(s.plus[i] == doctest::Approx(sf / ((gamma + eps) * (gamma + eps) + x * x)).epsilon(1e-10));
      CHECK(s.minus[i] == doctest::Approx(sf / ((gamma - eps) * (gamma - eps) + x * x)).epsilon(1e-10));
    }
  }
  const auto crit = decoupled_psd(modes, resonant_modulation(modes, 1.0), grid, dp, narrow, 0,
                                  Branch::kPlus);
  CHECK(crit.plus[50] == doctest::Approx(0.25 * base.plus[50]).epsilon(1e-10));
}

TEST_CASE("decoupled minus branch refuses the threshold") {
  const DimensionlessParams dp = reference_params();
  const ModeSet modes = find_modes(dp);
  const auto grid = linear_grid(-0.1, 0.1, 11);
  CHECK_THROWS_AS(decoupled_psd(modes, resonant_modulation(modes, 1.0), grid, dp), InstabilityError);
  try {
    decoupled_psd(modes, resonant_modulation(modes, 1.2), grid, dp, {}, 0, Branch::kMinus);
    FAIL("expected an instability error");
  } catch (const InstabilityError& e) {
    CHECK(e.mode() == 1);
    CHECK(e.quadrature() == "minus");
  }
  CHECK_NOTHROW(decoupled_psd(modes, resonant_modulation(modes, 1.0), grid, dp, {}, 0, Branch::kPlus));
}

TEST_CASE("decoupled and coupled paths agree for well separated modes") {
  const DimensionlessParams dp = test::separated_params();
  const ModeSet modes = find_modes(dp);
  REQUIRE(modes.separation() >= 50.0 * modes.max_damping());
  const auto grid = default_grid(modes);
  for (double f : {0.0, 0.5, 0.9}) {
    const ModulationParams mod = resonant_modulation(modes, f);
    const auto dec = decoupled_psd(modes, mod, grid, dp);
    const auto cpl = quadrature_psd(modes, mod, grid, dp)[0];
    double worst = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      worst = std::max({worst, test::rel_diff(dec.plus[i], cpl.plus[i]),
                        test::rel_diff(dec.minus[i], cpl.minus[i])});
    }
    CHECK(worst < 0.01);
  }
}

TEST_CASE("squeezing deepens monotonically with depth and spectra stay positive") {
  const DimensionlessParams dp = reference_params();
  const ModeSet modes = find_modes(dp);
  const auto grid = linear_grid(-0.2, 0.2, 201);
  const auto unmod = quadrature_psd(modes, resonant_modulation(modes, 0.0), grid, dp)[0];
  double prev_plus = unmod.plus[100], prev_minus = unmod.minus[100];
  for (int k = 1; k <= 9; ++k) {
    const auto s = quadrature_psd(modes, resonant_modulation(modes, 0.1 * k), grid, dp)[0];
    CHECK(s.plus[100] < prev_plus);
    CHECK(s.minus[100] > prev_minus);
    prev_plus = s.plus[100];
    prev_minus = s.minus[100];
    for (std::size_t i = 0; i < grid.size(); ++i) {
      CHECK(s.plus[i] >= -1e-12);
      CHECK(s.minus[i] >= -1e-12);
    }
  }
}

TEST_CASE("a pi shift of the modulation phase swaps the quadratures") {
  const DimensionlessParams dp = reference_params();
  const ModeSet modes = find_modes(dp);
  ModulationParams mod = resonant_modulation(modes, 0.6);
  const auto grid = linear_grid(-0.1, 0.1, 41);
  const auto a = quadrature_psd(modes, mod, grid, dp)[0];
  mod.phase += constants::kPi;
  const auto b = quadrature_psd(modes, mod, grid, dp)[0];
  for (std::size_t i = 0; i < grid.size(); ++i) {
    CHECK(test::rel_diff(a.plus[i], b.minus[i]) < 1e-10);
    CHECK(test::rel_diff(a.minus[i], b.plus[i]) < 1e-10);
  }
}

TEST_CASE("line variance reduction is bounded by one half") {
  const DimensionlessParams dp = reference_params();
  const ModeSet modes = find_modes(dp);
  Forcing narrow;
  narrow.narrowband = true;
  const double v0 =
      line_variance(modes, resonant_modulation(modes, 0.0), dp, narrow, 0, SolverPath::kDecoupled).plus;
  for (double f : {0.25, 0.5, 0.75, 0.95, 1.0}) {
    const double v = line_variance(modes, resonant_modulation(modes, f), dp, narrow, 0,
                                   SolverPath::kDecoupled).plus;
    CHECK(v / v0 == doctest::Approx(1.0 / (1.0 + f)).epsilon(1e-4));
    CHECK(v / v0 >= 0.5 - 1e-9);
  }
  CHECK(std::isinf(line_variance(modes, resonant_modulation(modes, 1.0), dp, narrow, 0,
                                 SolverPath::kDecoupled).minus));
  CHECK_THROWS_AS(line_variance(modes, resonant_modulation(modes, 0.5), dp, Forcing{}), ValidationError);
}

TEST_CASE("integrated variance uses the trapezoid rule over 2 pi") {
  const std::vector<double> grid = linear_grid(-1.0, 1.0, 5);
  CHECK(integrated_variance(grid, {1, 1, 1, 1, 1}) == doctest::Approx(2.0 / (2.0 * constants::kPi)));
  CHECK_THROWS(linear_grid(0.0, 1.0, 1));
}
