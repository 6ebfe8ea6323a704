#pragma once

#include <limits>

#include "lclock/integrator.hpp"
#include "lclock/meanfield.hpp"
#include "lclock/params.hpp"

namespace lclock {

enum class DetectionScheme { kImbalance, kSideband };

// One figure of merit with enough context to audit it: the raw integrals,
// the closed-form companion when one exists, and the settings that made it.
struct SnrReport {
  DetectionScheme scheme = DetectionScheme::kImbalance;
  double value = 0.0;
  double numerator = 0.0;    // signed signal integral
  double denominator = 1.0;  // noise normalization (1 for photon counting)
  double analytic = std::numeric_limits<double>::quiet_NaN();
  double deviation = std::numeric_limits<double>::quiet_NaN();
  double omega = 0.0;   // drive strength during the pulse, rad/s
  double window = 0.0;  // detection window, s (sideband scheme)
  double tol_rel = 0.0;
  double stride = 0.0;
};

// Instantaneous intensity difference between the two cavity output ports,
// in photons per second. Zero unless the signal mode carries amplitude.
double intensity_imbalance(const MeanFieldState& state,
                           const DerivedParams& params);

// Imbalance scheme: integrate the intensity difference over one pi/2 pulse
// and normalize by the shot noise of the total output. The trajectory must
// cover exactly [0, pi/(2*Omega)].
SnrReport snr1(const Trajectory& traj, const DerivedParams& params,
               double omega);

// Closed-form weak-drive limit of the imbalance scheme. Uses the recoil
// along the lattice axis, which is the kick the pulse actually imparts to
// the trapped motion.
double snr1_adiabatic(const DerivedParams& params, double omega);

struct Snr1Max {
  double value = 0.0;    // square-root recoil suppression
  double variant = 0.0;  // linear recoil suppression, a factor-4-ish stricter
};

// Upper envelope of the imbalance scheme over drive strength.
Snr1Max snr1_max(const DerivedParams& params);

// Sideband scheme: total signal-mode photon number collected over a window
// of length T starting at the trajectory's first sample.
SnrReport snr2(const Trajectory& traj, const DerivedParams& params, double T);

// Closed-form weak-drive limit of the sideband scheme.
double snr2_adiabatic(const DerivedParams& params, double omega, double T);

// Strong-drive saturation value of the sideband scheme.
double snr2_max(const DerivedParams& params, double T);

}  // namespace lclock
