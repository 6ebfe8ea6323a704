#pragma once

#include <Eigen/Dense>
#include <complex>

#include "lclock/oscillator.hpp"
#include "lclock/params.hpp"

namespace lclock {

// Snapshot of the mean-field system: per-level clock-state amplitudes
// (normalized so the summed |c|^2 is the atom number) and the two cavity
// sideband amplitudes.
struct MeanFieldState {
  Eigen::VectorXcd c_g;
  Eigen::VectorXcd c_e;
  std::complex<double> d_minus{0.0, 0.0};
  std::complex<double> d_plus{0.0, 0.0};
  double t = 0.0;
};

// All atoms in the electronic and vibrational ground state, cavity sidebands
// empty: c_g[0] = sqrt(N).
MeanFieldState initial_state(double atom_count, int n_max);

// Lattice-harmonic overlaps of the atomic density. All carry units of atoms.
struct DensityMoments {
  double C = 0;   // cos^2(k_L z) overlap
  double S = 0;   // sin^2(k_L z) overlap
  double S2 = 0;  // sin(2 k_L z) overlap, the sideband source
  double C2 = 0;  // cos(2 k_L z) overlap
};

struct ModelOptions {
  bool neglect_d_plus = true;        // drop the pumped-mode fluctuation
  bool include_atom_backaction = false;
  bool include_C2_drift = false;     // density-drift source in the d_plus line
  bool freeze_field = false;         // hold both cavity amplitudes fixed
};

struct DriveParams {
  double Omega = 0.0;  // clock Rabi frequency, rad/s
  double delta = 0.0;  // clock detuning, rad/s
};

struct Observables {
  double N_g = 0, N_e = 0;  // populations, atoms
  double z_g = 0, z_e = 0;  // position per atom, m
  double p_g = 0, p_e = 0;  // momentum per atom, kg m / s
};

// Owns the parameter set and operator matrices and evaluates the equations
// of motion. Stateless apart from scratch buffers; const methods are safe to
// call concurrently only from one thread per model instance.
class MeanFieldModel {
 public:
  MeanFieldModel(DerivedParams params, OperatorSet ops, ModelOptions opts = {});

  int n_max() const { return ops_.n_max; }
  int dim() const { return ops_.n_max + 1; }
  // Flattened complex dimension: both atomic vectors plus d_minus, d_plus.
  int flat_size() const { return 2 * dim() + 2; }

  const DerivedParams& params() const { return params_; }
  const OperatorSet& ops() const { return ops_; }
  const ModelOptions& options() const { return opts_; }
  double c2_reference() const { return c2_reference_; }

  DensityMoments moments(const MeanFieldState& state) const;
  Observables observables(const MeanFieldState& state) const;

  void rhs(const MeanFieldState& state, const DriveParams& drive,
           MeanFieldState& dstate) const;

  // Flat views for the integrator. Layout: [c_g, c_e, d_minus, d_plus].
  void pack(const MeanFieldState& state, Eigen::VectorXcd& y) const;
  void unpack(const Eigen::VectorXcd& y, double t, MeanFieldState& state) const;
  void rhs_flat(double t, const Eigen::VectorXcd& y, const DriveParams& drive,
                Eigen::VectorXcd& dydt) const;

 private:
  void check_dim(Eigen::Index got) const;

  DerivedParams params_;
  OperatorSet ops_;
  ModelOptions opts_;
  double c2_reference_;       // C2 of the canonical initial state
  Eigen::VectorXd n_omega_;   // level energies n * omega_osc

  mutable Eigen::VectorXd re_, im_, mre_, mim_;  // moment scratch
  mutable Eigen::VectorXcd tmp_;                 // drive scratch
};

}  // namespace lclock
