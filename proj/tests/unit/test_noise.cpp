#include <doctest.h>

#include <cmath>
#include <sstream>

#include "optomode/eigenmodes.hpp"
#include "optomode/errors.hpp"
#include "optomode/noise.hpp"
#include "reference.hpp"

using namespace optomode;

namespace {

const DetectorPreset& preset(const std::string& name) {
  const DetectorPreset* p = builtin_presets().find(name);
  REQUIRE(p != nullptr);
  return *p;
}

// Coating Brownian displacement density, written directly from the layer formula
// with quarter-wave thicknesses d = N lambda / (4 n).
double coating_displacement(double f, double w, double lambda, double T, const CoatingParams& c) {
  const double pi = constants::kPi;
  const double Y = c.substrate_young, sg = c.substrate_poisson;
  const double Y1 = c.layer1_young, s1 = c.layer1_poisson, p1 = c.layer1_loss;
  const double Y2 = c.layer2_young, s2 = c.layer2_poisson, p2 = c.layer2_loss;
  const double d1 = c.layer_pairs * lambda / (4.0 * c.layer1_index);
  const double d2 = c.layer_pairs * lambda / (4.0 * c.layer2_index);
  const double par = (1 + sg) * (1 - 2 * sg * sg) / (std::sqrt(pi) * w * Y * (1 - sg)) *
                     (Y1 * d1 * p1 / (1 - s1 * s1) + Y2 * d2 * p2 / (1 - s2 * s2));
  const double perp = Y / (std::sqrt(pi) * w * (1 - sg * sg)) *
                      ((1 + s1) * (1 - 2 * s1) * d1 * p1 / (Y1 * (1 - s1)) +
                       (1 + s2) * (1 - 2 * s2) * d2 * p2 / (Y2 * (1 - s2)));
  return 2 * constants::kBoltzmann * T * (1 - sg * sg) / (std::pow(pi, 1.5) * f * w * Y) *
         (par + perp);
}

}  // namespace

TEST_CASE("built-in presets carry the tabulated detector data") {
  const PresetCatalog& cat = builtin_presets();
  REQUIRE(cat.presets.size() == 5);
  struct Row { const char* name; double L, mu, w, kw, xi; };
  const Row rows[] = {{"aLIGO", 4e3, 10, 0.05, 5, 0.82},  {"ET", 10e3, 50, 0.09, 18, 0.15},
                      {"GP", 10, 0.1, 0.01, 10, 2.7},     {"AEI", 10, 0.025, 0.01, 10, 1.7},
                      {"Gingin", 77, 0.4, 0.01, 40, 3.8}};
  for (const Row& r : rows) {
    const DetectorPreset& p = preset(r.name);
    CHECK(p.arm_length == r.L);
    CHECK(p.reduced_mass == r.mu);
    CHECK(p.beam_radius == r.w);
    CHECK(p.arm_power_kw == r.kw);
    REQUIRE(p.reference_xi.has_value());
    CHECK(*p.reference_xi == r.xi);
  }
  CHECK(preset("ET").wavelength == 1.55e-6);
  CHECK(preset("ET").temperature_or(cat.coating) == 10.0);
  CHECK(preset("aLIGO").temperature_or(cat.coating) == 290.0);
  CHECK(cat.coating.layer_pairs == 20);
  CHECK(cat.coating.layer1_index == 2.035);
  CHECK(cat.coating.layer1_loss == 2e-4);
  CHECK(cat.coating.substrate_loss == 4e-10);
}

TEST_CASE("preset file errors are reported") {
  auto parse = [](const std::string& text) {
    std::istringstream in(text);
    return load_presets(in);
  };
  CHECK_THROWS_AS(parse("[preset:X]\narm_length = 10\nbogus = 1\n"), ValidationError);
  CHECK_THROWS_AS(parse("[detector]\narm_length = 10\n"), ValidationError);
  CHECK_THROWS_AS(parse("[preset:X]\narm_length = ten\nreduced_mass=1\nbeam_radius=0.01\npower_kw=1\n"),
                  ValidationError);
  CHECK_THROWS_AS(parse("[preset:X]\narm_length = -10\nreduced_mass=1\nbeam_radius=0.01\npower_kw=1\n"),
                  ValidationError);
  CHECK_THROWS_AS(parse("[preset:X]\nreduced_mass=1\nbeam_radius=0.01\npower_kw=1\n"), ValidationError);
  CHECK_THROWS_AS(parse("[preset:]\narm_length = 10\n"), ValidationError);
  CHECK_THROWS_AS(load_presets_file("/nonexistent/presets.ini"), ValidationError);

  const PresetCatalog ok =
      parse("[preset:Mine]\narm_length = 10\nreduced_mass = 1\nbeam_radius = 0.02\npower_kw = 3\n");
  REQUIRE(ok.presets.size() == 1);
  CHECK(ok.presets[0].name == "Mine");
  CHECK_FALSE(ok.presets[0].reference_xi.has_value());
  CHECK(ok.find("Other") == nullptr);
}

TEST_CASE("thermal density matches an independent evaluation of the coating formula") {
  const CoatingParams& c = builtin_presets().coating;
  for (const char* name : {"aLIGO", "ET", "Gingin"}) {
    const DetectorPreset& p = preset(name);
    const ClosureResult rates = close_parameters(p.arm_length, p.reduced_mass,
                                                 p.equivalent_power(), p.wavelength, 0.9, 0.1);
    for (double f : {10.0, 137.0, 2500.0}) {
      const double tau = p.arm_length / constants::kSpeedOfLight;
      const double expected = p.reduced_mass * rates.detuning / (2.0 * constants::kHbar * tau) *
                              coating_displacement(f, p.beam_radius, p.wavelength,
                                                   p.temperature_or(c), c);
      CHECK(thermal_psd(f, p, c, rates) == doctest::Approx(expected).epsilon(1e-12));
    }
  }
}

TEST_CASE("thermal density is linear in temperature, inverse in frequency, falls with beam radius") {
  const CoatingParams& c = builtin_presets().coating;
  DetectorPreset p = preset("aLIGO");
  const ClosureResult rates = close_parameters(p.arm_length, p.reduced_mass,
                                               p.equivalent_power(), p.wavelength, 0.9, 0.1);
  const double base = thermal_psd(50.0, p, c, rates);
  CHECK(thermal_psd(100.0, p, c, rates) == doctest::Approx(base / 2.0).epsilon(1e-13));
  CHECK(thermal_psd(5.0, p, c, rates) == doctest::Approx(base * 10.0).epsilon(1e-13));

  p.temperature = 580.0;
  CHECK(thermal_psd(50.0, p, c, rates) == doctest::Approx(2.0 * base).epsilon(1e-13));
  p.temperature = 29.0;
  CHECK(thermal_psd(50.0, p, c, rates) == doctest::Approx(0.1 * base).epsilon(1e-13));

  p = preset("aLIGO");
  p.beam_radius *= 1.5;
  CHECK(thermal_psd(50.0, p, c, rates) < base);
  CHECK_THROWS_AS(thermal_psd(0.0, p, c, rates), ValidationError);
}

TEST_CASE("vacuum forcing transfer and cross spectrum") {
  const DimensionlessParams dp = reference_params();
  const double g = dp.optical_damping, a = dp.feedback;
  const NoiseModel vac = NoiseModel::vacuum();
  for (double x : {0.0, 0.4, -0.9, 1.7}) {
    const auto t = vac.forcing_transfer(x, dp);
    CHECK(std::abs(t(0, 0) - (-g * cplx(g / 2.0, -x))) < 1e-15);
    CHECK(std::abs(t(0, 1) - (-g * std::sqrt(2.0 - g * g / 4.0))) < 1e-15);
    CHECK(std::abs(t(1, 1) - kI * x * a / 2.0) < 1e-15);
    CHECK(std::abs(t(1, 2) + x * x) < 1e-15);

    const Mat2c s = forcing_cross_spectrum(x, dp, vac);
    CHECK((s - s.adjoint()).norm() < 1e-15);
    CHECK(s(0, 0).real() >= 0.0);
    CHECK(std::real(s.determinant()) >= -1e-15);
    const double s11 = 0.5 * g * g * (2.0 + x * x);
    CHECK(s(0, 0).real() == doctest::Approx(s11));
    CHECK(s(1, 1).real() == doctest::Approx(0.5 * x * x * a * a / 4.0));
    const Mat2c sm = forcing_cross_spectrum(-x, dp, vac);
    CHECK((sm - s.conjugate()).norm() < 1e-15);
  }
}

TEST_CASE("thermal noise adds only to the mechanical channel") {
  const DetectorPreset& p = preset("aLIGO");
  const CoatingParams& c = builtin_presets().coating;
  const ThermalBath bath = ThermalBath::close(p, c, 0.9, 0.1);
  DimensionlessParams dp = reference_params();
  dp.kappa = bath.kappa;
  const NoiseModel vac = NoiseModel::vacuum();
  const NoiseModel th = NoiseModel::with_thermal(bath);
  for (double x : {0.3, 0.75, 1.2}) {
    const Mat2c diff = forcing_cross_spectrum(x, dp, th) - forcing_cross_spectrum(x, dp, vac);
    CHECK(std::abs(diff(0, 0)) == 0.0);
    CHECK(std::abs(diff(0, 1)) == 0.0);
    CHECK(std::abs(diff(1, 0)) == 0.0);
    const double f = to_hertz(x, bath.rates.relaxation_rate, bath.rates.detuning);
    CHECK(diff(1, 1).real() == doctest::Approx(0.5 * std::pow(x, 4) * thermal_psd(f, p, c, bath.rates)));
  }
  CHECK(th.thermal_only().channel_psd(0.5)[0] == 0.0);
  CHECK(th.quantum_only().channel_psd(0.5)[2] == 0.0);
  CHECK_THROWS_AS(vac.thermal_only(), ValidationError);
  CHECK(bath.referred_psd(0.0) == 0.0);
}

TEST_CASE("modal forcing density equals the dual-vector quadratic form") {
  const DimensionlessParams dp = reference_params();
  const ModeSet modes = find_modes(dp);
  for (int j = 0; j < 2; ++j) {
    const EigenMode& m = modes[j];
    const double band = 6.0 * m.damping;
    for (double x : {-0.05, 0.0, 0.03}) {
      const double X = m.frequency + x;
      const Mat2c s = forcing_cross_spectrum(X, dp);
      const cplx q = m.dual_vector.transpose() * s * m.dual_vector.conjugate();
      const double expected = q.real() / (4.0 * m.frequency * m.frequency);
      CHECK(std::abs(q.imag()) < 1e-14);
      if (std::abs(x) <= band) {
        CHECK(modal_forcing_psd(modes, j, x, band, dp) == doctest::Approx(expected).epsilon(1e-12));
      } else {
        CHECK(modal_forcing_psd(modes, j, x, band, dp) == 0.0);
      }
    }
  }
  Warnings w;
  modal_forcing_psd(modes, 0, 0.0, modes[0].damping, dp, NoiseModel::vacuum(), &w);
  CHECK(w.size() == 1);
  w.clear();
  modal_forcing_psd(modes, 0, 0.0, modes.separation(), dp, NoiseModel::vacuum(), &w);
  CHECK(w.size() == 1);
  CHECK_THROWS_AS(modal_forcing_psd(modes, 0, 0.0, 0.0, dp), ValidationError);
}

TEST_CASE("xi ordering and temperature scaling") {
  const PresetCatalog& cat = builtin_presets();
  const DimensionlessParams targets{0.9, 0.1, 0.1, 1.0};
  auto xi = [&](const std::string& name) { return xi_factor(preset(name), cat.coating, targets).xi; };
  const double gingin = xi("Gingin"), gp = xi("GP"), aei = xi("AEI"), aligo = xi("aLIGO"), et = xi("ET");
  CHECK(gingin > gp);
  CHECK(gp > aei);
  CHECK(aei > aligo);
  CHECK(aligo > et);

  DetectorPreset hot = preset("aLIGO");
  hot.temperature = 4.0 * 290.0;
  CHECK(xi_factor(hot, cat.coating, targets).xi == doctest::Approx(2.0 * aligo).epsilon(1e-10));

  const XiResult r = xi_factor(preset("aLIGO"), cat.coating, targets);
  CHECK(r.xi == doctest::Approx(std::sqrt(r.thermal_psd / r.quantum_psd)));
  CHECK(r.params.kappa == doctest::Approx(std::sqrt(r.rates.relaxation_rate * 4e3 / constants::kSpeedOfLight)));
}
