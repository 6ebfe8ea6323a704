#pragma once

#include <limits>
#include <string>
#include <vector>

#include "lclock/detection.hpp"
#include "lclock/integrator.hpp"
#include "lclock/meanfield.hpp"
#include "lclock/params.hpp"

namespace lclock {

// Knobs shared by every scenario driver. Defaults match the regression
// baselines; the robustness checks rerun with these tightened.
struct ExperimentOptions {
  Tolerances tol;
  int n_max = 20;                   // highest oscillator level retained
  double sample_stride = -1.0;      // negative: integrator picks
  ModelOptions model;
  // Long sideband windows settle into a periodic orbit; once settled, the
  // photon rate is averaged over full trap periods and the collected count
  // extended linearly instead of integrating the remainder step by step.
  bool extrapolate_window = true;
  int jobs = 1;                     // sweep workers
};

// pi/2 pulse from the motional and electronic ground state: constant drive
// over [0, pi/(2*Omega)], clock detuning taken from the config.
Trajectory run_pi_half_pulse(const PhysicalConfig& config, double omega,
                             const ExperimentOptions& opts = {});

// Runs the pulse, then lets the system ring down with the drive off for a
// further duration T. Returns only the post-pulse stretch; the field keeps
// evolving throughout.
Trajectory run_detection_window(const PhysicalConfig& config, double omega,
                                double T, const ExperimentOptions& opts = {});

// Pulse plus imbalance readout in one call.
SnrReport measure_snr1(const PhysicalConfig& config, double omega,
                       const ExperimentOptions& opts = {});

// Pulse, post-pulse window of length T, sideband readout. Honors
// opts.extrapolate_window for windows much longer than the settle time.
SnrReport measure_snr2(const PhysicalConfig& config, double omega, double T,
                       const ExperimentOptions& opts = {});

struct SweepPoint {
  double omega = 0.0;
  bool ok = false;
  SnrReport report;     // valid when ok
  std::string error;    // diagnostic when not
  double wall_seconds = 0.0;
};

struct SweepResult {
  DetectionScheme scheme = DetectionScheme::kImbalance;
  std::string parameter = "rabi_frequency_rad_per_s";
  std::vector<double> grid;          // strictly increasing
  std::vector<SweepPoint> points;    // one per grid entry, same order
  PhysicalConfig config;
  double window = 0.0;               // sideband scheme only, s
  // Sideband ceiling, constant across the grid; NaN for the imbalance scheme.
  double saturation = std::numeric_limits<double>::quiet_NaN();
};

// Drive-strength sweeps. The grid must be strictly increasing and stay
// inside [1e-3 * omega_rec, 1e2 * omega_osc]; a failed point is recorded
// with its diagnostic and the sweep moves on.
SweepResult sweep_snr1(const PhysicalConfig& config,
                       const std::vector<double>& grid,
                       const ExperimentOptions& opts = {});
SweepResult sweep_snr2(const PhysicalConfig& config,
                       const std::vector<double>& grid, double T,
                       const ExperimentOptions& opts = {});

struct PhaseSpacePoint {
  double t = 0.0;
  double z_g = 0.0, p_g = 0.0;  // per-atom centroid, ground manifold
  double z_e = 0.0, p_e = 0.0;
};

struct PhaseSpaceTrace {
  std::vector<PhaseSpacePoint> points;
  double omega = 0.0;
  double pulse_duration = 0.0;
  // Envelope diagnostics: largest |p| per manifold, split at the pulse end.
  double pulse_envelope_g = 0.0, pulse_envelope_e = 0.0;
  double post_envelope_g = 0.0, post_envelope_e = 0.0;
  // Fraction of pulse samples with opposite momentum signs, counting only
  // those where both manifolds are clear of the noise floor.
  double opposed_sign_fraction = 0.0;
};

// Centroid motion through the pulse and three further trap periods.
// omega <= 0 picks the benchmark drive, half the lattice recoil shift.
PhaseSpaceTrace phase_space_trace(const PhysicalConfig& config,
                                  double omega = 0.0,
                                  const ExperimentOptions& opts = {});

// Log-spaced grid over [lo, hi] at the given per-decade density, endpoints
// included. Used by the sweep subcommands and the shipped scenes.
std::vector<double> log_grid(double lo, double hi, int points_per_decade);

// Shipped scenes. The imbalance benchmark runs a high-finesse cavity with
// the pump parked on the bare resonance; the sideband benchmark runs the
// workhorse finesse with the pump tracking the dressed line.
PhysicalConfig fig5_config();
PhysicalConfig fig7_config();

}  // namespace lclock
