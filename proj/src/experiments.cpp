#include "lclock/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <sstream>
#include <thread>

#include "lclock/errors.hpp"
#include "lclock/oscillator.hpp"

namespace lclock {

namespace {

// Sampling for scenario output: forty points per period of the fastest
// coherent motion. The cavity relaxation can be much faster, but it only
// shows up as a brief switch-on ramp that carries no weight in the readout
// integrals, so resolving it in the saved samples would just burn memory.
double scenario_stride(const DerivedParams& params, double omega,
                       const ExperimentOptions& opts) {
  if (opts.sample_stride > 0.0) return opts.sample_stride;
  return 2.0 * kPi / (40.0 * std::max(params.omega_osc, omega));
}

void require_pulse_omega(double omega) {
  if (!(omega > 0.0) || !std::isfinite(omega)) {
    std::ostringstream msg;
    msg << "pulse drive strength must be positive and finite, got " << omega;
    throw ConfigError(msg.str());
  }
}

void require_ok(const Trajectory& traj, const char* stage) {
  if (!traj.ok()) {
    throw NumericalError(std::string(stage) + " integration aborted: " +
                         traj.diagnostic);
  }
}

struct Scene {
  DerivedParams params;
  MeanFieldModel model;
  double t_pulse;
  DriveSchedule schedule;

  Scene(const PhysicalConfig& config, double omega,
        const ExperimentOptions& opts)
      : params(derive(config)),
        model(params, build_operator_set(params, opts.n_max), opts.model),
        t_pulse(kPi / (2.0 * omega)) {
    schedule.append(t_pulse, DriveParams{omega, params.clock_detuning});
  }

  IntegratorOptions integrator_options(double omega,
                                       const ExperimentOptions& opts) const {
    IntegratorOptions io;
    io.tol = opts.tol;
    io.sample_stride = scenario_stride(params, omega, opts);
    return io;
  }
};

}  // namespace

Trajectory run_pi_half_pulse(const PhysicalConfig& config, double omega,
                             const ExperimentOptions& opts) {
  require_pulse_omega(omega);
  Scene scene(config, omega, opts);
  auto s0 = initial_state(scene.params.atom_count, opts.n_max);
  return integrate(scene.model, s0, 0.0, scene.t_pulse, scene.schedule,
                   scene.integrator_options(omega, opts));
}

Trajectory run_detection_window(const PhysicalConfig& config, double omega,
                                double T, const ExperimentOptions& opts) {
  require_pulse_omega(omega);
  if (!(T > 0.0) || !std::isfinite(T)) {
    std::ostringstream msg;
    msg << "detection window must be positive and finite, got " << T;
    throw ConfigError(msg.str());
  }
  Scene scene(config, omega, opts);
  auto s0 = initial_state(scene.params.atom_count, opts.n_max);

  // The pulse leg only feeds its end state into the window, so a handful of
  // samples suffices regardless of the requested stride.
  auto pulse_io = scene.integrator_options(omega, opts);
  pulse_io.sample_stride = scene.t_pulse / 8.0;
  auto pulse =
      integrate(scene.model, s0, 0.0, scene.t_pulse, scene.schedule, pulse_io);
  require_ok(pulse, "pulse");

  return integrate(scene.model, pulse.back().state, scene.t_pulse,
                   scene.t_pulse + T, scene.schedule,
                   scene.integrator_options(omega, opts));
}

SnrReport measure_snr1(const PhysicalConfig& config, double omega,
                       const ExperimentOptions& opts) {
  auto traj = run_pi_half_pulse(config, omega, opts);
  require_ok(traj, "pulse");
  auto params = derive(config);
  return snr1(traj, params, omega);
}

SnrReport measure_snr2(const PhysicalConfig& config, double omega, double T,
                       const ExperimentOptions& opts) {
  auto params = derive(config);
  const double period = 2.0 * kPi / params.omega_osc;
  // Transients decay at kappa/2; sixteen periods cover even a cavity that
  // rings for several oscillations, and eight more give the rate average.
  const int n_settle = std::max(
      16, static_cast<int>(std::ceil(16.0 / (params.kappa * period))));
  const int n_avg = 8;
  const double t_settled = (n_settle + n_avg) * period;

  if (!opts.extrapolate_window || T <= t_settled) {
    auto window = run_detection_window(config, omega, T, opts);
    require_ok(window, "detection window");
    auto report = snr2(window, params, T);
    report.omega = omega;
    report.analytic = snr2_adiabatic(params, omega, T);
    report.deviation = report.value / report.analytic - 1.0;
    return report;
  }

  auto window = run_detection_window(config, omega, t_settled, opts);
  require_ok(window, "detection window");
  auto report = snr2(window, params, t_settled);
  const double head = snr2(window, params, t_settled - n_avg * period).value;
  const double mean_rate = (report.value - head) / (n_avg * period);
  report.value += mean_rate * (T - t_settled);
  report.numerator = report.value;
  report.window = T;
  report.omega = omega;
  report.analytic = snr2_adiabatic(params, omega, T);
  report.deviation = report.value / report.analytic - 1.0;
  return report;
}

namespace {

void validate_sweep_grid(const std::vector<double>& grid,
                         const DerivedParams& params) {
  if (grid.empty()) throw ConfigError("sweep grid is empty");
  const double lo = 1e-3 * params.omega_rec;
  const double hi = 1e2 * params.omega_osc;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!std::isfinite(grid[i]) || grid[i] < lo || grid[i] > hi) {
      std::ostringstream msg;
      msg << "sweep grid point " << grid[i] << " rad/s is outside the trusted "
          << "drive range [" << lo << ", " << hi << "]";
      throw ConfigError(msg.str());
    }
    if (i > 0 && grid[i] <= grid[i - 1]) {
      throw ConfigError("sweep grid must be strictly increasing");
    }
  }
}

// Runs compute(i) for each grid index on up to `jobs` workers. Indices are
// claimed atomically; every result lands in its own slot, so the merged
// sweep is identical however the threads interleave.
template <typename Fn>
void for_each_point(int n, int jobs, Fn&& compute) {
  jobs = std::clamp(jobs, 1, std::max(1, n));
  if (jobs == 1) {
    for (int i = 0; i < n; ++i) compute(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  pool.reserve(jobs);
  for (int w = 0; w < jobs; ++w) {
    pool.emplace_back([&] {
      for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
        compute(i);
      }
    });
  }
  for (auto& worker : pool) worker.join();
}

template <typename MeasureFn>
SweepResult run_sweep(const PhysicalConfig& config,
                      const std::vector<double>& grid,
                      const ExperimentOptions& opts, MeasureFn&& measure) {
  validate_sweep_grid(grid, derive(config));
  SweepResult result;
  result.grid = grid;
  result.config = config;
  result.points.resize(grid.size());
  for_each_point(static_cast<int>(grid.size()), opts.jobs, [&](int i) {
    auto& point = result.points[i];
    point.omega = grid[i];
    const auto started = std::chrono::steady_clock::now();
    try {
      point.report = measure(grid[i]);
      point.ok = true;
    } catch (const std::exception& failure) {
      point.error = failure.what();
    }
    point.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                      started)
            .count();
  });
  return result;
}

}  // namespace

SweepResult sweep_snr1(const PhysicalConfig& config,
                       const std::vector<double>& grid,
                       const ExperimentOptions& opts) {
  auto result = run_sweep(config, grid, opts, [&](double omega) {
    return measure_snr1(config, omega, opts);
  });
  result.scheme = DetectionScheme::kImbalance;
  return result;
}

SweepResult sweep_snr2(const PhysicalConfig& config,
                       const std::vector<double>& grid, double T,
                       const ExperimentOptions& opts) {
  auto result = run_sweep(config, grid, opts, [&](double omega) {
    return measure_snr2(config, omega, T, opts);
  });
  result.scheme = DetectionScheme::kSideband;
  result.window = T;
  result.saturation = snr2_max(derive(config), T);
  return result;
}

PhaseSpaceTrace phase_space_trace(const PhysicalConfig& config, double omega,
                                  const ExperimentOptions& opts) {
  auto params = derive(config);
  if (omega <= 0.0) omega = 0.5 * params.omega_rec;
  Scene scene(config, omega, opts);
  auto s0 = initial_state(scene.params.atom_count, opts.n_max);
  const double post = 3.0 * 2.0 * kPi / params.omega_osc;
  auto traj = integrate(scene.model, s0, 0.0, scene.t_pulse + post,
                        scene.schedule,
                        scene.integrator_options(omega, opts));
  require_ok(traj, "phase space trace");

  PhaseSpaceTrace trace;
  trace.omega = omega;
  trace.pulse_duration = scene.t_pulse;
  trace.points.reserve(traj.samples.size());
  for (const auto& sample : traj.samples) {
    const auto& obs = sample.observables;
    trace.points.push_back(
        {sample.t, obs.z_g, obs.p_g, obs.z_e, obs.p_e});
    const bool in_pulse = sample.t <= scene.t_pulse * (1.0 + 1e-12);
    auto& env_g = in_pulse ? trace.pulse_envelope_g : trace.post_envelope_g;
    auto& env_e = in_pulse ? trace.pulse_envelope_e : trace.post_envelope_e;
    env_g = std::max(env_g, std::abs(obs.p_g));
    env_e = std::max(env_e, std::abs(obs.p_e));
  }

  const double floor_g = 1e-3 * trace.pulse_envelope_g;
  const double floor_e = 1e-3 * trace.pulse_envelope_e;
  std::size_t counted = 0, opposed = 0;
  for (const auto& point : trace.points) {
    if (point.t > scene.t_pulse * (1.0 + 1e-12)) break;
    if (std::abs(point.p_g) <= floor_g || std::abs(point.p_e) <= floor_e) {
      continue;
    }
    ++counted;
    if (point.p_g * point.p_e < 0.0) ++opposed;
  }
  trace.opposed_sign_fraction =
      counted == 0 ? 0.0 : static_cast<double>(opposed) / counted;
  return trace;
}

std::vector<double> log_grid(double lo, double hi, int points_per_decade) {
  if (!(lo > 0.0) || !(hi > lo) || points_per_decade < 1) {
    throw ConfigError(
        "log grid needs 0 < lo < hi and at least one point per decade");
  }
  const double decades = std::log10(hi / lo);
  const int n =
      std::max(2, static_cast<int>(std::lround(decades * points_per_decade)) +
                      1);
  std::vector<double> grid(n);
  for (int i = 0; i < n; ++i) {
    grid[i] = lo * std::pow(10.0, decades * i / (n - 1));
  }
  grid.front() = lo;
  grid.back() = hi;
  return grid;
}

PhysicalConfig fig5_config() {
  PhysicalConfig config;
  config.finesse = 1e6;
  config.cavity_detuning_mode = CavityDetuningMode::kExplicit;
  config.cavity_detuning = 0.0;
  return config;
}

PhysicalConfig fig7_config() {
  PhysicalConfig config;
  config.finesse = 1e4;
  config.cavity_detuning_mode = CavityDetuningMode::kDressedResonance;
  return config;
}

}  // namespace lclock
