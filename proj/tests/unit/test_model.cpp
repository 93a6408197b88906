#include <doctest.h>

#include <cmath>

#include "optomode/errors.hpp"
#include "optomode/model.hpp"
#include "reference.hpp"

using namespace optomode;

TEST_CASE("system matrix determinant is the expanded quartic") {
  const DimensionlessParams dp = reference_params();
  for (cplx x : {cplx{0.3, 0.0}, cplx{0.75, -0.02}, cplx{-1.2, 0.4}, cplx{2.0, 1.0}}) {
    const cplx det = system_matrix(x, dp).determinant();
    const cplx expected = test::expanded_determinant(x, dp.coupling, dp.optical_damping, dp.feedback);
    CHECK(std::abs(det - expected) <= 1e-13 * (1.0 + std::abs(expected)));
    CHECK(std::abs(characteristic_polynomial(x, dp) - expected) <= 1e-13 * (1.0 + std::abs(expected)));
  }
}

TEST_CASE("reference parameters") {
  const DimensionlessParams dp = reference_params();
  CHECK(dp.coupling == doctest::Approx(0.90));
  CHECK(dp.optical_damping == doctest::Approx(0.1));
  CHECK(dp.feedback == doctest::Approx(0.1));
  CHECK_NOTHROW(dp.validate());
}

TEST_CASE("parameter validation rejects out-of-range values") {
  DimensionlessParams dp = reference_params();
  dp.optical_damping = 2.0 * std::sqrt(2.0);
  CHECK_THROWS_AS(dp.validate(), ValidationError);
  dp = reference_params();
  dp.coupling = -0.1;
  CHECK_THROWS_AS(dp.validate(), ValidationError);
  dp = reference_params();
  dp.kappa = 0.0;
  CHECK_THROWS_AS(dp.validate(), ValidationError);

  ModulationParams mod;
  mod.depth = -1e-3;
  CHECK_THROWS_AS(mod.validate(), ValidationError);

  PhysicalParams phys{4000.0, 20.0, 1.5e6, 1.064e-6, 10.0, -5.0, 0.0};
  CHECK_THROWS_AS(phys.validate(), ValidationError);
}

TEST_CASE("closure reproduces the targets and the closed-form rate ratio") {
  const double L = 4000.0, mu = 20.0, P = 1.5e6, lambda = 1.064e-6;
  for (auto [A, g] : {std::pair{0.9, 0.1}, std::pair{0.5, 0.3}, std::pair{1.3, 1.0}}) {
    const ClosureResult r = close_parameters(L, mu, P, lambda, A, g);
    CHECK(r.residual <= 1e-10);
    // g = 2 sqrt(2) Gamma / sqrt(Gamma^2 + Delta^2)  =>  Gamma / Delta = g / sqrt(8 - g^2)
    CHECK(r.relaxation_rate / r.detuning == doctest::Approx(g / std::sqrt(8.0 - g * g)).epsilon(1e-10));

    PhysicalParams phys{L, mu, P, lambda, r.relaxation_rate, r.detuning,
                        feedback_gain_for(0.1, mu, r.relaxation_rate, r.detuning)};
    const DimensionlessParams back = to_dimensionless(phys);
    CHECK(back.coupling == doctest::Approx(A).epsilon(1e-10));
    CHECK(back.optical_damping == doctest::Approx(g).epsilon(1e-10));
    CHECK(back.feedback == doctest::Approx(0.1).epsilon(1e-10));
    CHECK(back.kappa == doctest::Approx(std::sqrt(r.relaxation_rate * L / constants::kSpeedOfLight)));
  }
}

TEST_CASE("closure rejects invalid targets") {
  CHECK_THROWS_AS(close_parameters(4000.0, 20.0, 1.5e6, 1.064e-6, 0.9, 3.0), ValidationError);
  CHECK_THROWS_AS(close_parameters(-1.0, 20.0, 1.5e6, 1.064e-6, 0.9, 0.1), ValidationError);
}

TEST_CASE("frequency bridge") {
  const double gamma = 30.0, delta = 400.0;
  const double norm = std::sqrt(gamma * gamma + delta * delta);
  CHECK(to_angular_frequency(std::sqrt(2.0), gamma, delta) == doctest::Approx(norm));
  CHECK(to_hertz(1.0, gamma, delta) ==
        doctest::Approx(norm / std::sqrt(2.0) / (2.0 * constants::kPi)));
}
