#include "optomode/oracle.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <mutex>
#include <ostream>
#include <random>
#include <thread>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <fftw3.h>
#include <fmt/core.h>
#include <fmt/ostream.h>

#include "optomode/errors.hpp"

namespace optomode {

namespace {

using constants::kPi;

constexpr double kBlowUpFactor = 1e6;
constexpr double kStepGuardSamples = 50.0;

// The FFTW planner is not re-entrant; execution on distinct arrays is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwBuffer {
  explicit FftwBuffer(std::size_t n) : size(n) {
    real = static_cast<double*>(fftw_malloc(sizeof(double) * n));
    spec = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * (n / 2 + 1)));
    if (!real || !spec) throw NumericalError("FFT buffer allocation failed");
  }
  ~FftwBuffer() {
    fftw_free(real);
    fftw_free(spec);
  }
  FftwBuffer(const FftwBuffer&) = delete;
  FftwBuffer& operator=(const FftwBuffer&) = delete;

  std::size_t size;
  double* real = nullptr;
  fftw_complex* spec = nullptr;
};

class Plan {
 public:
  Plan(FftwBuffer& buf, bool forward) {
    std::lock_guard<std::mutex> lock(planner_mutex());
    const int n = static_cast<int>(buf.size);
    plan_ = forward ? fftw_plan_dft_r2c_1d(n, buf.real, buf.spec, FFTW_ESTIMATE)
                    : fftw_plan_dft_c2r_1d(n, buf.spec, buf.real, FFTW_ESTIMATE);
    if (!plan_) throw NumericalError("FFT plan creation failed");
  }
  ~Plan() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(plan_);
  }
  Plan(const Plan&) = delete;
  Plan& operator=(const Plan&) = delete;
  void run() const { fftw_execute(plan_); }

 private:
  fftw_plan plan_ = nullptr;
};

struct PositiveRoots {
  std::vector<cplx> roots;  // ascending frequency
};

PositiveRoots positive_roots(const DimensionlessParams& dp) {
  PositiveRoots out;
  for (const cplx& s : characteristic_roots(dp)) {
    if (s.real() > 0.0) out.roots.push_back(s);
  }
  return out;
}

struct NoiseSeries {
  std::vector<double> nu1, nu2, a2;  // on the half-step grid
};

// Band-limited vacuum inputs: Fourier amplitudes c_k with E|c_k|^2 = S / T_record
// for X_k = 2 pi k / T_record <= cutoff, so that x(t) = sum_k c_k e^{-i X_k t} + c.c.
NoiseSeries synthesize_noise(const SimulationConfig& cfg, std::size_t n, double h) {
  const double record = static_cast<double>(n) * h;
  const double sigma = std::sqrt(NoiseModel::vacuum_psd() / record / 2.0);
  std::seed_seq seq{static_cast<std::uint32_t>(cfg.seed & 0xffffffffu),
                    static_cast<std::uint32_t>(cfg.seed >> 32),
                    static_cast<std::uint32_t>(cfg.run_index & 0xffffffffu),
                    static_cast<std::uint32_t>(cfg.run_index >> 32)};
  std::mt19937_64 rng(seq);
  std::normal_distribution<double> normal(0.0, sigma);

  const NoiseModel noise = NoiseModel::vacuum();
  FftwBuffer b1(n), b2(n), b3(n);
  const std::size_t half = n / 2;
  for (std::size_t k = 0; k <= half; ++k) {
    for (FftwBuffer* b : {&b1, &b2, &b3}) {
      b->spec[k][0] = 0.0;
      b->spec[k][1] = 0.0;
    }
  }
  for (std::size_t k = 1; k < half; ++k) {
    const double X = 2.0 * kPi * static_cast<double>(k) / record;
    const cplx a1(normal(rng), normal(rng));
    const cplx a2(normal(rng), normal(rng));
    if (X > cfg.noise_cutoff) continue;
    const auto t = noise.forcing_transfer(X, cfg.params);
    const cplx nu1 = t(0, 0) * a1 + t(0, 1) * a2;
    const cplx nu2 = t(1, 0) * a1 + t(1, 1) * a2;
    // c2r evaluates sum Y_k e^{+i X_k t}; the conjugate restores e^{-i X_k t}.
    const cplx y[3] = {std::conj(nu1), std::conj(nu2), std::conj(a2)};
    FftwBuffer* bufs[3] = {&b1, &b2, &b3};
    for (int c = 0; c < 3; ++c) {
      bufs[c]->spec[k][0] = y[c].real();
      bufs[c]->spec[k][1] = y[c].imag();
    }
  }
  NoiseSeries out;
  std::vector<double>* dest[3] = {&out.nu1, &out.nu2, &out.a2};
  FftwBuffer* bufs[3] = {&b1, &b2, &b3};
  for (int c = 0; c < 3; ++c) {
    Plan plan(*bufs[c], false);
    plan.run();
    dest[c]->assign(bufs[c]->real, bufs[c]->real + n);
  }
  return out;
}

[[noreturn]] void report_blow_up(const SimulationConfig& cfg, const std::array<double, 4>& y,
                                 double t) {
  const PositiveRoots pr = positive_roots(cfg.params);
  int mode = 1;
  double worst = INFINITY;
  for (std::size_t i = 0; i < pr.roots.size(); ++i) {
    const double gamma = -pr.roots[i].imag();
    if (gamma < worst) {
      worst = gamma;
      mode = static_cast<int>(i) + 1;
    }
  }
  std::string quadrature = "plus";
  if (!pr.roots.empty()) {
    const double w = pr.roots[static_cast<std::size_t>(mode - 1)].real();
    // Complex amplitude of b1 at the growing line: b1 = Re(a e^{-i w t}).
    const cplx a = cplx(y[0], y[2] / w) * std::polar(1.0, w * t);
    quadrature = std::abs(a.real()) >= std::abs(a.imag()) ? "plus" : "minus";
  }
  throw InstabilityError(
      fmt::format("simulation diverged at t = {:.4g}: mode {} ({} quadrature) grows "
                  "(damping {:.4g})",
                  t, mode, quadrature, worst),
      mode, quadrature);
}

double simpson(const std::vector<double>& f, double h) {
  const std::size_t n = f.size();
  if (n < 3 || n % 2 == 0) throw ValidationError("simpson: need an odd number >= 3 of nodes");
  double s = f.front() + f.back();
  for (std::size_t i = 1; i + 1 < n; ++i) s += (i % 2 == 1 ? 4.0 : 2.0) * f[i];
  return s * h / 3.0;
}

}  // namespace

double SimulationRun::duration() const {
  return static_cast<double>(b1.size() - 1 - transient_steps) * config.dt;
}

SimulationRun simulate(const SimulationConfig& cfg) {
  cfg.params.validate();
  cfg.modulation.validate();
  if (!(cfg.dt > 0.0)) throw ValidationError("simulate: dt must be positive");
  if (cfg.steps < 16) throw ValidationError("simulate: need at least 16 steps");
  if (!(cfg.noise_cutoff > 0.0)) throw ValidationError("simulate: noise cutoff must be positive");

  const PositiveRoots pr = positive_roots(cfg.params);
  double top = cfg.noise ? cfg.noise_cutoff : 0.0;
  double min_damping = INFINITY;
  for (const cplx& s : pr.roots) {
    top = std::max(top, s.real());
    min_damping = std::min(min_damping, -s.imag());
  }
  const double guard = 2.0 * kPi / (kStepGuardSamples * top);
  if (cfg.dt > guard) {
    throw ValidationError(fmt::format(
        "simulate: dt = {:.4g} violates the resolution guard 2 pi / (50 max(omega, cutoff)) "
        "= {:.4g}",
        cfg.dt, guard));
  }
  if (cfg.modulation.depth > 0.0) {
    const ModeSet modes = find_modes(cfg.params);
    const auto mc = critical_modulation(modes);
    const int near = std::abs(modes[0].frequency - cfg.modulation.half_frequency) <=
                             std::abs(modes[1].frequency - cfg.modulation.half_frequency)
                         ? 0
                         : 1;
    if (cfg.modulation.depth >= mc[static_cast<std::size_t>(near)]) {
      throw ValidationError(fmt::format(
          "simulate: depth {:.6g} is at or above the critical depth {:.6g}; no stationary regime",
          cfg.modulation.depth, mc[static_cast<std::size_t>(near)]));
    }
  }

  SimulationRun run;
  run.config = cfg;
  const double transient =
      cfg.transient >= 0.0 ? cfg.transient
                           : (min_damping > 0.0 && std::isfinite(min_damping) ? 10.0 / min_damping
                                                                              : 0.0);
  run.transient_steps = static_cast<std::size_t>(std::ceil(transient / cfg.dt));
  if (run.transient_steps >= cfg.steps) {
    throw ValidationError(fmt::format(
        "simulate: {} steps do not cover the transient of {:.4g} time units", cfg.steps,
        transient));
  }

  const std::size_t n_half = 2 * cfg.steps;
  const double h = cfg.dt / 2.0;
  NoiseSeries noise;
  if (cfg.noise) noise = synthesize_noise(cfg, n_half, h);
  auto sample = [&](const std::vector<double>& v, std::size_t k) {
    return v.empty() ? 0.0 : v[k % n_half];
  };

  const double A = cfg.params.coupling;
  const double g = cfg.params.optical_damping;
  const double alpha = cfg.params.feedback;
  const double kappa = cfg.params.kappa;
  const double m2 = 2.0 * cfg.modulation.depth;
  const double two_p = 2.0 * cfg.modulation.half_frequency;
  const double phi = cfg.modulation.phase;

  using State = std::array<double, 4>;
  auto rhs = [&](const State& y, double a_t, double n1, double n2) {
    return State{y[2], y[3], n1 - g * y[2] - 2.0 * y[0] - a_t * y[1],
                 n2 + a_t * y[0] + alpha * y[2]};
  };

  State y = cfg.initial_state;
  double ref = std::sqrt(y[0] * y[0] + y[1] * y[1] + y[2] * y[2] + y[3] * y[3]);
  if (!(ref > 0.0) || cfg.noise) ref = std::max(ref, 1.0);
  const double limit2 = (kBlowUpFactor * ref) * (kBlowUpFactor * ref);

  run.b1.resize(cfg.steps + 1);
  run.z.resize(cfg.steps + 1);
  run.a2_out.resize(cfg.steps + 1);
  auto record = [&](std::size_t n) {
    run.b1[n] = y[0];
    run.z[n] = y[1];
    run.a2_out[n] = -sample(noise.a2, 2 * n) - 2.0 * kappa * y[0];
  };
  record(0);

  for (std::size_t n = 0; n < cfg.steps; ++n) {
    const double t = static_cast<double>(n) * cfg.dt;
    const std::size_t k = 2 * n;
    const double a0 = A * (1.0 + m2 * std::cos(two_p * t + phi));
    const double a1 = A * (1.0 + m2 * std::cos(two_p * (t + h) + phi));
    const double a2 = A * (1.0 + m2 * std::cos(two_p * (t + cfg.dt) + phi));
    const double n10 = sample(noise.nu1, k), n20 = sample(noise.nu2, k);
    const double n11 = sample(noise.nu1, k + 1), n21 = sample(noise.nu2, k + 1);
    const double n12 = sample(noise.nu1, k + 2), n22 = sample(noise.nu2, k + 2);

    const State k1 = rhs(y, a0, n10, n20);
    State tmp;
    for (int i = 0; i < 4; ++i) tmp[i] = y[i] + h * k1[i];
    const State k2 = rhs(tmp, a1, n11, n21);
    for (int i = 0; i < 4; ++i) tmp[i] = y[i] + h * k2[i];
    const State k3 = rhs(tmp, a1, n11, n21);
    for (int i = 0; i < 4; ++i) tmp[i] = y[i] + cfg.dt * k3[i];
    const State k4 = rhs(tmp, a2, n12, n22);
    for (int i = 0; i < 4; ++i) y[i] += cfg.dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);

    const double norm2 = y[0] * y[0] + y[1] * y[1] + y[2] * y[2] + y[3] * y[3];
    if (!(norm2 <= limit2)) report_blow_up(cfg, y, t + cfg.dt);
    record(n + 1);
  }
  return run;
}

DemodResult jackknife_mean(const std::vector<double>& estimates) {
  const std::size_t n = estimates.size();
  if (n < 2) throw ValidationError("jackknife: need at least two estimates");
  double total = 0.0;
  for (double v : estimates) total += v;
  const double mean = total / static_cast<double>(n);
  double ss = 0.0;
  for (double v : estimates) {
    const double loo = (total - v) / static_cast<double>(n - 1);
    ss += (loo - mean) * (loo - mean);
  }
  DemodResult r;
  r.variance = mean;
  r.error = std::sqrt(static_cast<double>(n - 1) / static_cast<double>(n) * ss);
  r.samples = n;
  return r;
}

DemodResult demodulate(const std::vector<double>& signal, double dt, double t0, double omega,
                       double phase, double band, double min_duration, int blocks) {
  if (!(dt > 0.0) || !(band > 0.0)) throw ValidationError("demodulate: dt and band must be positive");
  if (blocks < 2) throw ValidationError("demodulate: need at least two jackknife blocks");
  const std::size_t n = signal.size();
  const double length = static_cast<double>(n) * dt;
  if (n < static_cast<std::size_t>(4 * blocks) || length < min_duration) {
    throw ValidationError(fmt::format(
        "demodulate: record of {:.4g} time units is shorter than the required {:.4g}", length,
        min_duration));
  }
  FftwBuffer buf(n);
  for (std::size_t i = 0; i < n; ++i) {
    buf.real[i] = signal[i] * std::cos(omega * (t0 + static_cast<double>(i) * dt) + phase);
  }
  {
    Plan forward(buf, true);
    forward.run();
  }
  for (std::size_t k = 0; k <= n / 2; ++k) {
    const double X = 2.0 * kPi * static_cast<double>(k) / length;
    if (X > band) {
      buf.spec[k][0] = 0.0;
      buf.spec[k][1] = 0.0;
    }
  }
  {
    Plan backward(buf, false);
    backward.run();
  }
  const double scale = 1.0 / static_cast<double>(n);
  double mean = 0.0;
  for (std::size_t i = 0; i < n; ++i) mean += buf.real[i] * scale;
  mean /= static_cast<double>(n);

  const std::size_t per = n / static_cast<std::size_t>(blocks);
  std::vector<double> block_var(static_cast<std::size_t>(blocks), 0.0);
  for (int b = 0; b < blocks; ++b) {
    double s = 0.0;
    for (std::size_t i = b * per; i < (b + 1) * per; ++i) {
      const double d = buf.real[i] * scale - mean;
      s += d * d;
    }
    block_var[static_cast<std::size_t>(b)] = s / static_cast<double>(per);
  }
  DemodResult r = jackknife_mean(block_var);
  r.mean = mean;
  r.samples = n;
  return r;
}

DemodResult demodulate(const SimulationRun& run, const ModeSet& modes, int j, double phase,
                       double band) {
  const std::size_t first = run.transient_steps;
  const std::vector<double> segment(run.a2_out.begin() + static_cast<std::ptrdiff_t>(first),
                                    run.a2_out.end());
  return demodulate(segment, run.config.dt, run.time(first), modes[j].frequency, phase, band,
                    50.0 / modes[j].damping);
}

RingdownFit ringdown_fit(const std::vector<double>& series, double dt, std::size_t stride,
                         std::size_t first, std::size_t count) {
  if (stride == 0) throw ValidationError("ringdown_fit: stride must be positive");
  std::vector<double> x;
  for (std::size_t i = first; i < series.size() && (count == 0 || x.size() < count); i += stride) {
    x.push_back(series[i]);
  }
  constexpr int kOrder = 4;
  if (x.size() < 4 * kOrder) throw ValidationError("ringdown_fit: too few samples");
  const int rows = static_cast<int>(x.size()) - kOrder;
  Eigen::MatrixXd lhs(rows, kOrder);
  Eigen::VectorXd rhs(rows);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < kOrder; ++c) lhs(r, c) = x[static_cast<std::size_t>(r + kOrder - 1 - c)];
    rhs(r) = x[static_cast<std::size_t>(r + kOrder)];
  }
  const Eigen::VectorXd coef = lhs.colPivHouseholderQr().solve(rhs);
  // z^4 - c1 z^3 - c2 z^2 - c3 z - c4 = 0.
  Eigen::Matrix4d companion = Eigen::Matrix4d::Zero();
  for (int c = 0; c < kOrder; ++c) companion(0, c) = coef(c);
  for (int r = 1; r < kOrder; ++r) companion(r, r - 1) = 1.0;
  const Eigen::EigenSolver<Eigen::Matrix4d> es(companion, false);
  const double h = dt * static_cast<double>(stride);
  std::vector<cplx> roots;
  for (int k = 0; k < kOrder; ++k) {
    const cplx s = kI * std::log(cplx(es.eigenvalues()(k))) / h;
    if (s.real() > 0.0) roots.push_back(s);
  }
  if (roots.size() != 2) {
    throw NumericalError(fmt::format(
        "ringdown_fit: expected two oscillating components, found {}", roots.size()));
  }
  std::sort(roots.begin(), roots.end(),
            [](const cplx& a, const cplx& b) { return a.real() < b.real(); });
  return {{roots[0], roots[1]}};
}

double analytic_demod_variance(const DimensionlessParams& dp, const ModulationParams& mod,
                               double demod_frequency, double phase, double band,
                               const LadderOptions& opts, int nodes) {
  const double h = 2.0 * band / (nodes - 1);
  std::vector<double> f(static_cast<std::size_t>(nodes));
  for (int i = 0; i < nodes; ++i) {
    const double x = -band + i * h;
    f[static_cast<std::size_t>(i)] =
        ladder_demod_psd(x, demod_frequency, phase, dp, mod, NoiseModel::vacuum(), opts);
  }
  return 0.25 * simpson(f, h) / (2.0 * kPi);
}

double modal_demod_variance(const ModeSet& modes, const ModulationParams& mod,
                            const DimensionlessParams& dp, int j, double phase, double band,
                            int nodes) {
  const double h = 2.0 * band / (nodes - 1);
  std::vector<double> f(static_cast<std::size_t>(nodes));
  const Forcing forcing{};
  for (int i = 0; i < nodes; ++i) {
    const double x = -band + i * h;
    f[static_cast<std::size_t>(i)] = output_psd_at_phase(modes, mod, x, phase, dp, forcing, j);
  }
  return 0.25 * simpson(f, h) / (2.0 * kPi);
}

QuadratureCheck crosscheck(double monte_carlo, double error, double analytic, double tolerance,
                           double sigmas) {
  QuadratureCheck c;
  c.monte_carlo = monte_carlo;
  c.monte_carlo_error = error;
  c.analytic = analytic;
  c.relative_error = std::abs(monte_carlo - analytic) / std::abs(analytic);
  c.allowed = std::max(sigmas * error / std::abs(analytic), tolerance);
  c.pass = std::isfinite(c.relative_error) && c.relative_error <= c.allowed;
  return c;
}

OracleReport run_crosscheck(const OracleConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  if (cfg.runs < 2) throw ValidationError("oracle: need at least two runs per depth");
  if (cfg.depth_fractions.empty()) throw ValidationError("oracle: empty depth list");
  for (double f : cfg.depth_fractions) {
    if (!(f >= 0.0 && f < 1.0)) {
      throw ValidationError(fmt::format("oracle: depth fraction {} outside [0, 1)", f));
    }
  }
  OracleReport report;
  report.config = cfg;
  const ModeSet modes = find_modes(cfg.params);
  if (!modes.stable) throw NumericalError("oracle: parameters are unstable without modulation");
  report.critical_depth = critical_modulation(modes)[0];

  const double phases[2] = {0.0, kPi / 2.0};
  const char* names[2] = {"plus", "minus"};
  LadderOptions ladder = cfg.ladder;
  ladder.noise_cutoff = cfg.noise_cutoff;
  unsigned workers = cfg.threads ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());

  for (std::size_t d = 0; d < cfg.depth_fractions.size(); ++d) {
    const double frac = cfg.depth_fractions[d];
    const ModulationParams mod = resonant_modulation(modes, frac, 0);

    // estimates[run][j * 2 + q]
    std::vector<std::array<double, 4>> estimates(static_cast<std::size_t>(cfg.runs));
    std::atomic<int> next{0};
    std::mutex error_mutex;
    std::exception_ptr failure;
    auto worker = [&] {
      for (int r = next++; r < cfg.runs; r = next++) {
        try {
          SimulationConfig sc;
          sc.params = cfg.params;
          sc.modulation = mod;
          sc.dt = cfg.dt;
          sc.steps = cfg.steps;
          sc.noise_cutoff = cfg.noise_cutoff;
          sc.seed = cfg.seed;
          sc.run_index = d * static_cast<std::uint64_t>(cfg.runs) + static_cast<std::uint64_t>(r);
          const SimulationRun run = simulate(sc);
          for (int j = 0; j < 2; ++j) {
            for (int q = 0; q < 2; ++q) {
              estimates[static_cast<std::size_t>(r)][static_cast<std::size_t>(j * 2 + q)] =
                  demodulate(run, modes, j, phases[q], cfg.band_factor * modes[j].damping)
                      .variance;
            }
          }
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    };
    std::vector<std::thread> pool;
    for (unsigned w = 1; w < workers; ++w) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);

    ModulationParams reference = mod;
    if (cfg.corrupt_epsilon) reference.phase += kPi;
    for (int j = 0; j < 2; ++j) {
      const double band = cfg.band_factor * modes[j].damping;
      for (int q = 0; q < 2; ++q) {
        std::vector<double> values;
        for (const auto& e : estimates) values.push_back(e[static_cast<std::size_t>(j * 2 + q)]);
        const DemodResult mc = jackknife_mean(values);
        const double exact =
            analytic_demod_variance(cfg.params, reference, modes[j].frequency, phases[q], band,
                                    ladder);
        QuadratureCheck c = crosscheck(mc.variance, mc.error, exact, cfg.tolerance, cfg.sigmas);
        c.depth_fraction = frac;
        c.mode = j + 1;
        c.quadrature = names[q];
        c.modal = modal_demod_variance(modes, reference, cfg.params, j, phases[q], band);
        report.checks.push_back(c);
      }
    }
  }

  if (cfg.ringdown) {
    SimulationConfig sc;
    sc.params = cfg.params;
    sc.noise = false;
    sc.dt = cfg.dt;
    sc.initial_state = {1.0, 0.0, 0.0, 0.0};
    sc.transient = 0.0;
    const double window = 5.0 / modes.max_damping();
    sc.steps = static_cast<std::size_t>(std::ceil(window / cfg.dt)) + 16;
    const SimulationRun run = simulate(sc);
    const auto stride = static_cast<std::size_t>(std::max(1.0, std::round(0.5 / cfg.dt)));
    const RingdownFit fit = ringdown_fit(run.b1, cfg.dt, stride);
    for (int j = 0; j < 2; ++j) {
      RingdownCheck c;
      c.mode = j + 1;
      c.expected_frequency = modes[j].frequency;
      c.expected_damping = modes[j].damping;
      c.fitted_frequency = fit.roots[static_cast<std::size_t>(j)].real();
      c.fitted_damping = -fit.roots[static_cast<std::size_t>(j)].imag();
      c.relative_error = std::abs(c.fitted_damping - c.expected_damping) / c.expected_damping;
      c.pass = c.relative_error <= 0.01;
      report.ringdown.push_back(c);
    }
  }

  report.pass = std::all_of(report.checks.begin(), report.checks.end(),
                            [](const QuadratureCheck& c) { return c.pass; }) &&
                std::all_of(report.ringdown.begin(), report.ringdown.end(),
                            [](const RingdownCheck& c) { return c.pass; });
  report.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

void write_report(std::ostream& out, const OracleReport& r) {
  const OracleConfig& c = r.config;
  fmt::print(out, "# seed = {}\n", c.seed);
  fmt::print(out, "# A = {}, g = {}, alpha = {}\n", c.params.coupling, c.params.optical_damping,
             c.params.feedback);
  fmt::print(out, "# runs = {}, steps = {}, dt = {}, noise_cutoff = {}, band = {} gamma\n",
             c.runs, c.steps, c.dt, c.noise_cutoff, c.band_factor);
  fmt::print(out, "# critical depth m_c = {:.12g}{}\n", r.critical_depth,
             c.corrupt_epsilon ? " (analytic side uses corrupted eps sign)" : "");
  fmt::print(out, "{:>6} {:>4} {:>6} {:>14} {:>12} {:>14} {:>14} {:>9} {:>9}  {}\n", "m/m_c",
             "mode", "quad", "monte_carlo", "stat_err", "exact", "modal", "rel_err", "allowed",
             "verdict");
  for (const auto& q : r.checks) {
    fmt::print(out, "{:>6.2f} {:>4} {:>6} {:>14.6e} {:>12.3e} {:>14.6e} {:>14.6e} {:>9.4f} {:>9.4f}  {}\n",
               q.depth_fraction, q.mode, q.quadrature, q.monte_carlo, q.monte_carlo_error,
               q.analytic, q.modal, q.relative_error, q.allowed, q.pass ? "PASS" : "FAIL");
  }
  for (const auto& d : r.ringdown) {
    fmt::print(out, "ringdown mode {}: omega {:.8f} (expected {:.8f}), gamma {:.8f} (expected "
                    "{:.8f}), rel err {:.2e}  {}\n",
               d.mode, d.fitted_frequency, d.expected_frequency, d.fitted_damping,
               d.expected_damping, d.relative_error, d.pass ? "PASS" : "FAIL");
  }
  fmt::print(out, "oracle: {} ({:.1f} s)\n", r.pass ? "PASS" : "FAIL", r.seconds);
}

void write_trajectory_csv(std::ostream& out, const SimulationRun& run, std::size_t stride,
                          const std::vector<std::string>& header) {
  if (stride == 0) throw ValidationError("trajectory: stride must be positive");
  for (const auto& line : header) out << "# " << line << '\n';
  fmt::print(out, "# seed = {}, run = {}\n", run.config.seed, run.config.run_index);
  out << "t,b1,z\n";
  for (std::size_t n = 0; n < run.b1.size(); n += stride) {
    fmt::print(out, "{:.15g},{:.15g},{:.15g}\n", run.time(n), run.b1[n], run.z[n]);
  }
}

}  // namespace optomode
