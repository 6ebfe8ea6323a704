#include "lclock/detection.hpp"

#include <cmath>
#include <complex>
#include <sstream>

#include "lclock/constants.hpp"
#include "lclock/errors.hpp"

namespace lclock {

namespace {

void require_finite(double value, const char* what) {
  if (!std::isfinite(value)) {
    std::ostringstream msg;
    msg << what << " is not finite";
    throw NumericalError(msg.str());
  }
}

// Trapezoid over the trajectory samples of an arbitrary sample functional,
// up to and including t_cut (linearly interpolating the last interval).
template <typename F>
double trapezoid(const Trajectory& traj, double t_cut, F&& f) {
  double acc = 0.0;
  for (std::size_t i = 1; i < traj.samples.size(); ++i) {
    const auto& a = traj.samples[i - 1];
    const auto& b = traj.samples[i];
    if (b.t <= t_cut) {
      acc += 0.5 * (f(a) + f(b)) * (b.t - a.t);
    } else {
      if (a.t < t_cut) {
        const double w = (t_cut - a.t) / (b.t - a.t);
        const double f_cut = (1.0 - w) * f(a) + w * f(b);
        acc += 0.5 * (f(a) + f_cut) * (t_cut - a.t);
      }
      break;
    }
  }
  return acc;
}

}  // namespace

double intensity_imbalance(const MeanFieldState& state,
                           const DerivedParams& params) {
  const std::complex<double> pump = params.beta_plus + state.d_plus;
  return 2.0 * params.kappa * (std::conj(pump) * state.d_minus).real();
}

SnrReport snr1(const Trajectory& traj, const DerivedParams& params,
               double omega) {
  if (omega < 0.0) throw ConfigError("drive strength must be nonnegative");
  if (traj.samples.size() < 2) {
    throw ConfigError("trajectory has too few samples for an SNR integral");
  }
  const double t0 = traj.front().t;
  const double t1 = traj.back().t;
  if (omega > 0.0) {
    const double t_pulse = kPi / (2.0 * omega);
    if (std::abs(t0) > 1e-9 * t_pulse ||
        std::abs(t1 - t_pulse) > 1e-9 * t_pulse) {
      std::ostringstream msg;
      msg << "trajectory spans [" << t0 << ", " << t1
          << "] but the pulse is [0, " << t_pulse << "]";
      throw ConfigError(msg.str());
    }
  }

  const double signal = trapezoid(traj, t1, [&](const TrajectorySample& s) {
    return intensity_imbalance(s.state, params);
  });
  const double output = trapezoid(traj, t1, [&](const TrajectorySample& s) {
    const std::complex<double> pump = params.beta_plus + s.state.d_plus;
    return params.kappa * (std::norm(pump) + std::norm(s.state.d_minus));
  });

  SnrReport report;
  report.scheme = DetectionScheme::kImbalance;
  report.numerator = signal;
  report.denominator = std::sqrt(output);
  report.value = report.denominator > 0.0
                     ? std::abs(signal) / report.denominator
                     : 0.0;
  report.omega = omega;
  report.tol_rel = traj.settings.tol_rel;
  report.stride = traj.settings.stride;
  if (omega > 0.0) {
    report.analytic = snr1_adiabatic(params, omega);
    report.deviation = report.value / report.analytic - 1.0;
  }
  require_finite(report.value, "imbalance SNR");
  return report;
}

double snr1_adiabatic(const DerivedParams& params, double omega) {
  if (!(omega > 0.0)) throw ConfigError("drive strength must be positive");
  const double ratio = params.k_c / params.k_L;
  const double noise =
      std::sqrt(kPi * params.kappa * params.omega_osc * params.omega_osc /
                (16.0 * std::abs(params.g0) * omega * params.omega_rec_axial));
  return params.atom_count * ratio / noise;
}

Snr1Max snr1_max(const DerivedParams& params) {
  const double ratio = params.k_c / params.k_L;
  const double recoil = params.omega_rec / params.omega_osc;
  const double base = std::sqrt(params.atom_count) * (4.0 / std::sqrt(kPi)) *
                      ratio *
                      std::sqrt(params.atom_count * std::abs(params.g0) /
                                params.kappa);
  Snr1Max out;
  out.value = base * std::sqrt(recoil);
  out.variant = base * recoil;
  return out;
}

SnrReport snr2(const Trajectory& traj, const DerivedParams& params, double T) {
  if (!(T > 0.0)) throw ConfigError("detection window must be positive");
  if (traj.samples.size() < 2) {
    throw ConfigError("trajectory has too few samples for an SNR integral");
  }
  const double span = traj.back().t - traj.front().t;
  if (span < T * (1.0 - 1e-9)) {
    std::ostringstream msg;
    msg << "trajectory covers " << span << " s but the detection window is "
        << T << " s";
    throw ConfigError(msg.str());
  }

  const double t_cut = traj.front().t + T;
  const double photons = trapezoid(traj, t_cut, [&](const TrajectorySample& s) {
    return params.kappa * std::norm(s.state.d_minus);
  });

  SnrReport report;
  report.scheme = DetectionScheme::kSideband;
  report.numerator = photons;
  report.denominator = 1.0;
  report.value = photons;
  report.window = T;
  report.tol_rel = traj.settings.tol_rel;
  report.stride = traj.settings.stride;
  require_finite(report.value, "sideband SNR");
  return report;
}

double snr2_adiabatic(const DerivedParams& params, double omega, double T) {
  if (!(omega > 0.0)) throw ConfigError("drive strength must be positive");
  if (!(T > 0.0)) throw ConfigError("detection window must be positive");
  const double ratio = params.k_c / params.k_L;
  const double lorentz = params.Delta * params.Delta +
                         0.25 * params.kappa * params.kappa;
  return ratio * ratio * params.atom_count * params.atom_count * omega * omega *
         params.kappa * T / (32.0 * lorentz * params.beta_plus_sq);
}

double snr2_max(const DerivedParams& params, double T) {
  if (!(T > 0.0)) throw ConfigError("detection window must be positive");
  const double geometry = params.k_c * params.k_L * params.a_osc * params.a_osc;
  const double lorentz = params.Delta * params.Delta +
                         0.25 * params.kappa * params.kappa;
  return geometry * geometry * params.atom_count * params.atom_count *
         params.beta_plus_sq * params.g0 * params.g0 * params.kappa * T /
         (2.0 * lorentz);
}

}  // namespace lclock
