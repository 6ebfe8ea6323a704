#include "lclock/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "lclock/constants.hpp"
#include "lclock/errors.hpp"

namespace lclock {

void DriveSchedule::append(double duration, DriveParams drive) {
  if (!(duration > 0.0) || !std::isfinite(duration)) {
    throw ConfigError("drive segment duration must be positive and finite");
  }
  if (breaks_.empty()) breaks_.push_back(0.0);
  breaks_.push_back(breaks_.back() + duration);
  drives_.push_back(drive);
}

const DriveParams& DriveSchedule::drive_at(double t, int direction) const {
  if (drives_.empty()) return background_;
  std::ptrdiff_t idx;
  if (direction >= 0) {
    idx = std::upper_bound(breaks_.begin(), breaks_.end(), t) - breaks_.begin() - 1;
  } else {
    idx = std::lower_bound(breaks_.begin(), breaks_.end(), t) - breaks_.begin() - 1;
  }
  if (idx < 0 || idx >= static_cast<std::ptrdiff_t>(drives_.size())) {
    return background_;
  }
  return drives_[static_cast<std::size_t>(idx)];
}

std::vector<double> DriveSchedule::edges_between(double t_a, double t_b) const {
  const double lo = std::min(t_a, t_b);
  const double hi = std::max(t_a, t_b);
  std::vector<double> out;
  for (double b : breaks_) {
    if (b > lo && b < hi) out.push_back(b);
  }
  if (t_b < t_a) std::reverse(out.begin(), out.end());
  return out;
}

double DriveSchedule::max_omega(double t_a, double t_b) const {
  const double lo = std::min(t_a, t_b);
  const double hi = std::max(t_a, t_b);
  double out = 0.0;
  if (drives_.empty() || lo < breaks_.front() || hi > breaks_.back()) {
    out = std::abs(background_.Omega);
  }
  for (std::size_t i = 0; i < drives_.size(); ++i) {
    if (breaks_[i] < hi && breaks_[i + 1] > lo) {
      out = std::max(out, std::abs(drives_[i].Omega));
    }
  }
  return out;
}

double Tolerances::resolve_abs(double atom_count) const {
  if (abs > 0.0) return abs;
  return 1e-10 * std::sqrt(atom_count);
}

std::complex<double> slaved_signal_amplitude(const DerivedParams& params,
                                             const DensityMoments& moments,
                                             std::complex<double> d_plus) {
  const std::complex<double> denom(0.5 * params.kappa,
                                   -(params.Delta - 2.0 * params.g0 * moments.S));
  return -params.g0 * (params.beta_plus + d_plus) * moments.S2 / denom;
}

namespace {

using Eigen::VectorXcd;

// Dormand-Prince 5(4) tableau. The last stage is evaluated at the step end
// point with the fifth-order weights, so it doubles as the next step's first
// stage (FSAL).
constexpr double kC2 = 1.0 / 5.0, kC3 = 3.0 / 10.0, kC4 = 4.0 / 5.0,
                 kC5 = 8.0 / 9.0;
constexpr double kA21 = 1.0 / 5.0;
constexpr double kA31 = 3.0 / 40.0, kA32 = 9.0 / 40.0;
constexpr double kA41 = 44.0 / 45.0, kA42 = -56.0 / 15.0, kA43 = 32.0 / 9.0;
constexpr double kA51 = 19372.0 / 6561.0, kA52 = -25360.0 / 2187.0,
                 kA53 = 64448.0 / 6561.0, kA54 = -212.0 / 729.0;
constexpr double kA61 = 9017.0 / 3168.0, kA62 = -355.0 / 33.0,
                 kA63 = 46732.0 / 5247.0, kA64 = 49.0 / 176.0,
                 kA65 = -5103.0 / 18656.0;
constexpr double kB1 = 35.0 / 384.0, kB3 = 500.0 / 1113.0, kB4 = 125.0 / 192.0,
                 kB5 = -2187.0 / 6784.0, kB6 = 11.0 / 84.0;
// Fifth-order weights minus the embedded fourth-order ones.
constexpr double kE1 = 71.0 / 57600.0, kE3 = -71.0 / 16695.0,
                 kE4 = 71.0 / 1920.0, kE5 = -17253.0 / 339200.0,
                 kE6 = 22.0 / 525.0, kE7 = -1.0 / 40.0;
// Weights of the fourth-order continuous extension.
constexpr double kD1 = -12715105075.0 / 11282082432.0;
constexpr double kD3 = 87487479700.0 / 32700410799.0;
constexpr double kD4 = -10690763975.0 / 1880347072.0;
constexpr double kD5 = 701980252875.0 / 199316789632.0;
constexpr double kD6 = -1453857185.0 / 822651844.0;
constexpr double kD7 = 69997945.0 / 29380423.0;

double error_norm(const VectorXcd& y0, const VectorXcd& y1,
                  const VectorXcd& yerr, double atol, double rtol) {
  double acc = 0.0;
  for (Eigen::Index i = 0; i < y0.size(); ++i) {
    const double sc =
        atol + rtol * std::max(std::abs(y0(i)), std::abs(y1(i)));
    const double e = std::abs(yerr(i)) / sc;
    acc += e * e;
  }
  return std::sqrt(acc / static_cast<double>(y0.size()));
}

}  // namespace

Trajectory integrate(const MeanFieldModel& model, const MeanFieldState& state0,
                     double t_start, double t_end,
                     const DriveSchedule& schedule,
                     const IntegratorOptions& opts) {
  if (!std::isfinite(t_start) || !std::isfinite(t_end) || t_start == t_end) {
    throw ConfigError("integration span must be nonempty and finite");
  }
  if (!(opts.tol.rel > 0.0)) throw ConfigError("tol.rel must be positive");
  const double atol = opts.tol.resolve_abs(model.params().atom_count);
  if (!(atol > 0.0)) throw ConfigError("tol.abs must be positive");
  if (opts.max_steps == 0) throw ConfigError("max_steps must be positive");

  const int dir = t_end > t_start ? 1 : -1;

  double stride = opts.sample_stride;
  if (stride <= 0.0) {
    const double rate = std::max({model.params().omega_osc,
                                  model.params().kappa,
                                  schedule.max_omega(t_start, t_end)});
    stride = kTwoPi / (20.0 * rate);
  }

  Trajectory out;
  out.settings = {opts.tol.rel, atol, stride};

  const int n = model.flat_size();
  const int idx_dm = 2 * model.dim();
  VectorXcd y(n);
  model.pack(state0, y);
  if (!y.allFinite()) throw ConfigError("initial state is not finite");

  MeanFieldState scratch;
  auto pin_signal_mode = [&](VectorXcd& yy) {
    model.unpack(yy, 0.0, scratch);
    yy(idx_dm) = slaved_signal_amplitude(model.params(), model.moments(scratch),
                                         scratch.d_plus);
  };
  if (opts.slave_signal_mode) pin_signal_mode(y);

  auto push_sample = [&](double ts, const VectorXcd& ys) {
    TrajectorySample s;
    s.t = ts;
    model.unpack(ys, ts, s.state);
    if (opts.slave_signal_mode) {
      s.state.d_minus = slaved_signal_amplitude(
          model.params(), model.moments(s.state), s.state.d_plus);
    }
    s.moments = model.moments(s.state);
    s.observables = model.observables(s.state);
    out.samples.push_back(std::move(s));
  };
  push_sample(t_start, y);

  VectorXcd k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n);
  VectorXcd ytmp(n), ynew(n), yerr(n), yslave(n), ydense(n);
  auto eval_rhs = [&](double t, const VectorXcd& yy, const DriveParams& drive,
                      VectorXcd& dydt) {
    if (opts.slave_signal_mode) {
      yslave = yy;
      pin_signal_mode(yslave);
      model.rhs_flat(t, yslave, drive, dydt);
      dydt(idx_dm) = std::complex<double>{0.0, 0.0};
    } else {
      model.rhs_flat(t, yy, drive, dydt);
    }
    ++out.n_rhs_evals;
  };

  // Segment ends: every drive discontinuity inside the span, then t_end.
  std::vector<double> seg_ends = schedule.edges_between(t_start, t_end);
  seg_ends.push_back(t_end);

  double t = t_start;
  std::uint64_t sample_idx = 1;
  bool grid_done = false;
  int nonfinite_strikes = 0;
  double h = dir * 0.5 * stride;

  auto fail = [&](TerminationReason reason, const std::string& why) {
    out.termination = reason;
    out.diagnostic = why;
    if (out.samples.back().t != t) push_sample(t, y);
    return out;
  };

  for (double seg_end : seg_ends) {
    const DriveParams& drive = schedule.drive_at(t, dir);
    bool have_fsal = false;
    while (t != seg_end) {
      if (out.n_steps + out.n_rejected >= opts.max_steps) {
        return fail(TerminationReason::kMaxStepsExceeded,
                    "step budget exhausted");
      }
      const double remaining = seg_end - t;
      const double h_proposed = h;
      bool hit_end = false;
      if (std::abs(h) >= std::abs(remaining)) {
        h = remaining;
        hit_end = true;
      }
      const double hmin =
          16.0 * std::numeric_limits<double>::epsilon() *
          std::max(std::abs(t), std::abs(seg_end));
      if (std::abs(h) < hmin) {
        std::ostringstream why;
        why << "step size underflow at t = " << t << " (h = " << h << ")";
        return fail(TerminationReason::kStepSizeUnderflow, why.str());
      }

      if (!have_fsal) {
        eval_rhs(t, y, drive, k1);
        have_fsal = true;
        if (!k1.allFinite()) {
          // The derivative at an accepted point is broken; no step size can
          // recover from that.
          std::ostringstream why;
          why << "non-finite derivative at t = " << t;
          return fail(TerminationReason::kNonFinite, why.str());
        }
      }
      ytmp = y + h * (kA21 * k1);
      eval_rhs(t + kC2 * h, ytmp, drive, k2);
      ytmp = y + h * (kA31 * k1 + kA32 * k2);
      eval_rhs(t + kC3 * h, ytmp, drive, k3);
      ytmp = y + h * (kA41 * k1 + kA42 * k2 + kA43 * k3);
      eval_rhs(t + kC4 * h, ytmp, drive, k4);
      ytmp = y + h * (kA51 * k1 + kA52 * k2 + kA53 * k3 + kA54 * k4);
      eval_rhs(t + kC5 * h, ytmp, drive, k5);
      ytmp = y + h * (kA61 * k1 + kA62 * k2 + kA63 * k3 + kA64 * k4 + kA65 * k5);
      eval_rhs(t + h, ytmp, drive, k6);
      ynew = y + h * (kB1 * k1 + kB3 * k3 + kB4 * k4 + kB5 * k5 + kB6 * k6);
      eval_rhs(t + h, ynew, drive, k7);
      yerr = h * (kE1 * k1 + kE3 * k3 + kE4 * k4 + kE5 * k5 + kE6 * k6 +
                  kE7 * k7);

      const double err = error_norm(y, ynew, yerr, atol, opts.tol.rel);
      if (!std::isfinite(err) || !ynew.allFinite()) {
        // A trial step that overshoots can overflow without the model being
        // sick; shrink and retry a few times before giving up.
        if (++nonfinite_strikes > 25) {
          std::ostringstream why;
          why << "non-finite state at t = " << t << " (h = " << h << ")";
          return fail(TerminationReason::kNonFinite, why.str());
        }
        h *= 0.25;
        ++out.n_rejected;
        continue;
      }

      if (err > 1.0) {
        ++out.n_rejected;
        const double factor =
            std::clamp(0.9 * std::pow(err, -0.2), 0.2, 1.0);
        h *= factor;
        continue;
      }

      // Accepted. Emit any sample grid points this step covers, using the
      // fourth-order continuous extension of the step.
      ++out.n_steps;
      const double t_new = hit_end ? seg_end : t + h;
      bool dense_ready = false;
      VectorXcd ydiff, bspl, r4, r5;
      while (!grid_done) {
        const double ts = t_start + dir * stride * static_cast<double>(sample_idx);
        if ((t_end - ts) * dir <= 0.0) {
          grid_done = true;  // final point handled after the loop
          break;
        }
        if ((ts - t_new) * dir > 0.0) break;
        if (!dense_ready) {
          ydiff = ynew - y;
          bspl = h * k1 - ydiff;
          r4 = ydiff - h * k7 - bspl;
          r5 = h * (kD1 * k1 + kD3 * k3 + kD4 * k4 + kD5 * k5 + kD6 * k6 +
                    kD7 * k7);
          dense_ready = true;
        }
        const double theta = (ts - t) / h;
        const double theta1 = 1.0 - theta;
        ydense = y + theta * (ydiff + theta1 * (bspl + theta * (r4 + theta1 * r5)));
        push_sample(ts, ydense);
        ++sample_idx;
      }

      t = t_new;
      y.swap(ynew);
      k1.swap(k7);  // FSAL
      if (opts.slave_signal_mode) pin_signal_mode(y);
      if (hit_end) {
        // The clamp, not the error test, shortened this step; resume from
        // the controller's own proposal in the next segment.
        h = h_proposed;
      } else {
        const double factor =
            std::clamp(0.9 * std::pow(std::max(err, 1e-10), -0.2), 0.2, 5.0);
        h = dir * std::min(std::abs(h * factor), std::abs(t_end - t_start));
      }
    }
  }

  if (out.samples.back().t != t_end) push_sample(t_end, y);
  out.termination = TerminationReason::kReachedEnd;
  return out;
}

}  // namespace lclock
