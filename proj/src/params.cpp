#include "lclock/params.hpp"

#include <cmath>
#include <sstream>

#include "lclock/errors.hpp"

namespace lclock {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw ConfigError(what);
}

}  // namespace

void PhysicalConfig::validate() const {
  require(atom_count > 0 && std::isfinite(atom_count), "atom_count must be positive");
  require(atomic_mass > 0, "atomic_mass_kg must be positive");
  require(polarizability_over_eps0 != 0 && std::isfinite(polarizability_over_eps0),
          "polarizability_over_eps0_m3 must be nonzero");
  require(lattice_wavelength > 0, "lattice_wavelength_m must be positive");
  require(clock_wavelength > 0, "clock_wavelength_m must be positive");
  require(cavity_length > 0, "cavity_length_m must be positive");
  require(finesse > 0, "finesse must be positive");
  require(waist > 0, "waist_m must be positive");
  require(trap_frequency_ratio > 0, "trap_frequency_ratio must be positive");
  require(std::isfinite(clock_detuning), "clock_detuning_rad_per_s must be finite");
  require(std::isfinite(cavity_detuning), "cavity_detuning_rad_per_s must be finite");

  // The axial wavenumber is k_c / ratio and cannot exceed the full lattice
  // wavenumber 2 pi / lattice_wavelength.
  const double min_ratio = lattice_wavelength / clock_wavelength;
  if (!(lattice_geometry_ratio >= min_ratio)) {
    std::ostringstream msg;
    msg << "lattice_geometry_ratio must be >= lattice_wavelength / clock_wavelength = "
        << min_ratio;
    throw ConfigError(msg.str());
  }
}

std::complex<double> beta_plus_steady_state(double pump_eta, double Delta,
                                            double kappa, double g0, double C0) {
  const std::complex<double> denom(Delta - 2.0 * g0 * C0, 0.5 * kappa);
  return std::sqrt(2.0) * pump_eta / denom;
}

double commensurate_rabi(int m, double omega_osc) {
  if (m <= 0) throw ConfigError("commensurate_rabi requires m >= 1");
  return omega_osc / (4.0 * m);
}

DerivedParams derive(const PhysicalConfig& config) {
  config.validate();

  DerivedParams p;
  p.atom_count = config.atom_count;
  p.atomic_mass = config.atomic_mass;
  p.clock_detuning = config.clock_detuning;

  p.omega_laser = kTwoPi * kSpeedOfLight / config.lattice_wavelength;
  p.k_full = kTwoPi / config.lattice_wavelength;
  p.k_c = kTwoPi / config.clock_wavelength;
  p.k_L = p.k_c / config.lattice_geometry_ratio;

  const double mode_cross_section = kPi * config.waist * config.waist;
  p.g0 = config.polarizability_over_eps0 * p.omega_laser /
         (mode_cross_section * config.cavity_length);
  p.kappa = kTwoPi * kSpeedOfLight / (config.cavity_length * config.finesse);

  const double m = config.atomic_mass;
  p.omega_rec = kHbar * p.k_full * p.k_full / (2.0 * m);
  p.omega_rec_axial = kHbar * p.k_L * p.k_L / (2.0 * m);
  p.omega_osc = config.trap_frequency_ratio * p.omega_rec;
  p.a_osc = std::sqrt(kHbar / (m * p.omega_osc));
  p.eta_L = p.k_L * p.a_osc;
  p.eta_c = p.k_c * p.a_osc;
  p.lamb_dicke_warning = p.eta_c > 0.5;

  // Photon number that makes the lattice exactly deep enough for omega_osc:
  // the standing-wave curvature 4 hbar |g0| |beta|^2 k_L^2 equals m omega^2.
  p.beta_plus_sq =
      m * p.omega_osc * p.omega_osc / (4.0 * kHbar * std::abs(p.g0) * p.k_L * p.k_L);

  p.C0 = p.atom_count * 0.5 * (1.0 + std::exp(-p.eta_L * p.eta_L));

  p.Delta = config.cavity_detuning_mode == CavityDetuningMode::kDressedResonance
                ? 2.0 * p.g0 * p.C0
                : config.cavity_detuning;

  // Pump amplitude chosen so the frozen-atom steady state carries beta_plus_sq.
  const std::complex<double> denom(p.Delta - 2.0 * p.g0 * p.C0, 0.5 * p.kappa);
  p.pump_eta = std::sqrt(p.beta_plus_sq) * std::abs(denom) / std::sqrt(2.0);
  p.beta_plus = beta_plus_steady_state(p.pump_eta, p.Delta, p.kappa, p.g0, p.C0);

  return p;
}

}  // namespace lclock
