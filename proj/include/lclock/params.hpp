#pragma once

#include <complex>

#include "lclock/constants.hpp"

namespace lclock {

enum class CavityDetuningMode {
  kDressedResonance,  // pump sits on the collectively shifted cavity line
  kExplicit,          // caller supplies the detuning directly
};

// User-facing knobs. SI units; angular frequencies in rad/s.
struct PhysicalConfig {
  double atom_count = 1e6;
  double atomic_mass = kSr87Mass;               // kg
  double polarizability_over_eps0 = -5.37e-28;  // alpha / eps0, m^3
  double lattice_wavelength = 813e-9;           // m
  double clock_wavelength = 698.4e-9;           // m
  double cavity_length = 1e-2;                  // ring round trip, m
  double finesse = 1e4;
  double waist = 30e-6;                         // cavity mode waist, m
  double lattice_geometry_ratio = 2.0;          // k_clock / k_lattice_axial
  double trap_frequency_ratio = 20.0;           // omega_osc / omega_rec
  double clock_detuning = 0.0;                  // default drive detuning, rad/s
  CavityDetuningMode cavity_detuning_mode = CavityDetuningMode::kDressedResonance;
  double cavity_detuning = 0.0;                 // rad/s, kExplicit only

  // Throws ConfigError on out-of-range values, including a lattice geometry
  // ratio below lattice_wavelength / clock_wavelength (projection would
  // exceed the full wavenumber).
  void validate() const;
};

// Everything downstream works in these closed-over quantities.
struct DerivedParams {
  // Echoed inputs.
  double atom_count = 0;
  double atomic_mass = 0;
  double clock_detuning = 0;

  // Geometry and single-photon scales.
  double omega_laser = 0;      // lattice carrier, rad/s
  double k_full = 0;           // 2 pi / lattice wavelength, 1/m
  double k_c = 0;              // 2 pi / clock wavelength, 1/m
  double k_L = 0;              // axial lattice wavenumber k_c / ratio, 1/m
  double g0 = 0;               // single-photon dispersive shift, rad/s
  double kappa = 0;            // cavity linewidth (FWHM), rad/s

  // Trap.
  double omega_rec = 0;        // recoil at k_full, rad/s
  double omega_rec_axial = 0;  // recoil at k_L, rad/s
  double omega_osc = 0;        // axial trap frequency, rad/s
  double a_osc = 0;            // oscillator length, m
  double eta_L = 0;            // k_L * a_osc
  double eta_c = 0;            // k_c * a_osc
  bool lamb_dicke_warning = false;  // eta_c > 0.5

  // Pumped mode steady state.
  double beta_plus_sq = 0;     // photon number holding the requested trap
  double C0 = 0;               // initial sum over atoms of <cos^2(k_L z)>
  double Delta = 0;            // cavity detuning in use, rad/s
  double pump_eta = 0;         // pump amplitude, rad/s, real >= 0
  std::complex<double> beta_plus{0, 0};
};

// Runs the full derivation chain. Calls config.validate() first.
DerivedParams derive(const PhysicalConfig& config);

// Steady state of the pumped mode with the atoms frozen in place:
// beta = sqrt(2) eta / (Delta + i kappa / 2 - 2 g0 C0).
std::complex<double> beta_plus_steady_state(double pump_eta, double Delta,
                                            double kappa, double g0, double C0);

// Rabi frequency whose quarter-period spans exactly m trap periods, so a
// pi/2 pulse ends at a multiple of the oscillation: omega_osc / (4 m).
double commensurate_rabi(int m, double omega_osc);

}  // namespace lclock
