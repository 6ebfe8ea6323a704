#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "lclock/meanfield.hpp"

namespace lclock {

// Piecewise-constant clock drive. Intervals appended with append() tile
// [0, end_time()); everywhere else the background drive applies. A pulse
// followed by a dark detection window is one schedule with one appended
// interval and an off background.
class DriveSchedule {
 public:
  explicit DriveSchedule(DriveParams background = {}) : background_(background) {}

  static DriveSchedule constant(DriveParams drive) {
    return DriveSchedule(drive);
  }

  void append(double duration, DriveParams drive);

  int segment_count() const { return static_cast<int>(drives_.size()); }
  double end_time() const { return breaks_.empty() ? 0.0 : breaks_.back(); }
  const DriveParams& background() const { return background_; }

  // Drive governing an infinitesimal interval on the given side of t
  // (direction +1 looks at [t, t+eps), -1 at (t-eps, t]).
  const DriveParams& drive_at(double t, int direction) const;

  // Breakpoints strictly between t_a and t_b, ordered from t_a toward t_b.
  // Integration steps never straddle these.
  std::vector<double> edges_between(double t_a, double t_b) const;

  // Largest |Omega| in force anywhere on [min(t_a,t_b), max(t_a,t_b)].
  double max_omega(double t_a, double t_b) const;

 private:
  DriveParams background_;
  std::vector<double> breaks_;       // 0, T1, T2, ... (empty if no segments)
  std::vector<DriveParams> drives_;  // drive on [breaks_[i], breaks_[i+1])
};

struct Tolerances {
  double rel = 1e-8;
  double abs = -1.0;  // negative: resolve to 1e-10 * sqrt(atom_count)

  double resolve_abs(double atom_count) const;
};

struct IntegratorOptions {
  Tolerances tol;
  // Sampling stride; negative resolves to the densest dynamical timescale,
  // one twentieth of the shortest of 2*pi/omega_osc, 2*pi/Omega, 2*pi/kappa.
  double sample_stride = -1.0;
  // Replace the signal-mode ODE by its instantaneous steady state. Valid in
  // the overdamped regime, used only for cross-checks.
  bool slave_signal_mode = false;
  std::uint64_t max_steps = 50'000'000;
};

enum class TerminationReason {
  kReachedEnd,
  kStepSizeUnderflow,
  kNonFinite,
  kMaxStepsExceeded,
};

struct TrajectorySample {
  double t = 0.0;
  MeanFieldState state;
  DensityMoments moments;
  Observables observables;
};

struct TrajectorySettings {
  double tol_rel = 0.0;
  double tol_abs = 0.0;
  double stride = 0.0;
};

struct Trajectory {
  std::vector<TrajectorySample> samples;
  TrajectorySettings settings;
  TerminationReason termination = TerminationReason::kReachedEnd;
  std::string diagnostic;  // empty unless the run aborted
  std::uint64_t n_steps = 0;
  std::uint64_t n_rejected = 0;
  std::uint64_t n_rhs_evals = 0;

  bool ok() const { return termination == TerminationReason::kReachedEnd; }
  const TrajectorySample& front() const { return samples.front(); }
  const TrajectorySample& back() const { return samples.back(); }
};

// Advance state0 from t_start to t_end (either direction) under the given
// schedule, sampling along the way. On step-size underflow or a non-finite
// state the trajectory ends early and carries the reason plus a diagnostic.
Trajectory integrate(const MeanFieldModel& model, const MeanFieldState& state0,
                     double t_start, double t_end,
                     const DriveSchedule& schedule,
                     const IntegratorOptions& opts = {});

// Instantaneous steady state of the signal mode given the current atomic
// density, the algebraic limit the slaved mode pins the field to.
std::complex<double> slaved_signal_amplitude(const DerivedParams& params,
                                             const DensityMoments& moments,
                                             std::complex<double> d_plus);

}  // namespace lclock
