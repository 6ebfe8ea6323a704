#include "lclock/meanfield.hpp"

#include <cmath>
#include <sstream>

#include "lclock/errors.hpp"

namespace lclock {

namespace {

using Complex = std::complex<double>;
constexpr Complex kI{0.0, 1.0};

}  // namespace

MeanFieldState initial_state(double atom_count, int n_max) {
  if (atom_count <= 0) throw ConfigError("atom_count must be positive");
  if (n_max < 0) throw ConfigError("n_max must be >= 0");
  MeanFieldState s;
  s.c_g = Eigen::VectorXcd::Zero(n_max + 1);
  s.c_e = Eigen::VectorXcd::Zero(n_max + 1);
  s.c_g(0) = std::sqrt(atom_count);
  return s;
}

MeanFieldModel::MeanFieldModel(DerivedParams params, OperatorSet ops,
                               ModelOptions opts)
    : params_(std::move(params)), ops_(std::move(ops)), opts_(opts) {
  const int d = dim();
  n_omega_ = params_.omega_osc * Eigen::VectorXd::LinSpaced(d, 0.0, d - 1.0);
  // Drift source is measured against the untouched initial density.
  c2_reference_ = params_.atom_count * ops_.cos_2kL(0, 0);
  re_.resize(d);
  im_.resize(d);
  mre_.resize(d);
  mim_.resize(d);
  tmp_.resize(d);
}

void MeanFieldModel::check_dim(Eigen::Index got) const {
  if (got != dim()) {
    std::ostringstream msg;
    msg << "state has " << got << " levels but operators were built for "
        << dim();
    throw ConfigError(msg.str());
  }
}

DensityMoments MeanFieldModel::moments(const MeanFieldState& state) const {
  check_dim(state.c_g.size());
  check_dim(state.c_e.size());
  // For a real symmetric M, c^dag M c = x.M.x + y.M.y with c = x + i y;
  // the imaginary part cancels identically, so moments come out exactly real.
  auto bilinear = [&](const Eigen::MatrixXd& m, const Eigen::VectorXcd& c) {
    re_ = c.real();
    im_ = c.imag();
    mre_.noalias() = m * re_;
    mim_.noalias() = m * im_;
    return re_.dot(mre_) + im_.dot(mim_);
  };
  DensityMoments out;
  out.C = bilinear(ops_.cos_sq, state.c_g) + bilinear(ops_.cos_sq, state.c_e);
  out.S = bilinear(ops_.sin_sq, state.c_g) + bilinear(ops_.sin_sq, state.c_e);
  out.S2 = bilinear(ops_.sin_2kL, state.c_g) + bilinear(ops_.sin_2kL, state.c_e);
  out.C2 = bilinear(ops_.cos_2kL, state.c_g) + bilinear(ops_.cos_2kL, state.c_e);
  return out;
}

Observables MeanFieldModel::observables(const MeanFieldState& state) const {
  check_dim(state.c_g.size());
  check_dim(state.c_e.size());
  Observables out;
  out.N_g = state.c_g.squaredNorm();
  out.N_e = state.c_e.squaredNorm();
  const double floor = 1e-12 * params_.atom_count;
  auto per_atom = [&](const Eigen::VectorXcd& c, double population,
                      double& z_out, double& p_out) {
    if (population < floor) {
      z_out = 0.0;
      p_out = 0.0;
      return;
    }
    re_ = c.real();
    im_ = c.imag();
    mre_.noalias() = ops_.z * re_;
    mim_.noalias() = ops_.z * im_;
    z_out = (re_.dot(mre_) + im_.dot(mim_)) / population;
    tmp_.noalias() = ops_.p * c;
    p_out = c.dot(tmp_).real() / population;
  };
  per_atom(state.c_g, out.N_g, out.z_g, out.p_g);
  per_atom(state.c_e, out.N_e, out.z_e, out.p_e);
  return out;
}

void MeanFieldModel::pack(const MeanFieldState& state, Eigen::VectorXcd& y) const {
  check_dim(state.c_g.size());
  check_dim(state.c_e.size());
  const int d = dim();
  y.resize(flat_size());
  y.segment(0, d) = state.c_g;
  y.segment(d, d) = state.c_e;
  y(2 * d) = state.d_minus;
  y(2 * d + 1) = state.d_plus;
}

void MeanFieldModel::unpack(const Eigen::VectorXcd& y, double t,
                            MeanFieldState& state) const {
  if (y.size() != flat_size()) throw ConfigError("flat state size mismatch");
  const int d = dim();
  state.c_g = y.segment(0, d);
  state.c_e = y.segment(d, d);
  state.d_minus = y(2 * d);
  state.d_plus = y(2 * d + 1);
  state.t = t;
}

void MeanFieldModel::rhs_flat(double t, const Eigen::VectorXcd& y,
                              const DriveParams& drive,
                              Eigen::VectorXcd& dydt) const {
  if (y.size() != flat_size()) throw ConfigError("flat state size mismatch");
  const int d = dim();
  dydt.resize(flat_size());

  const auto c_g = y.segment(0, d);
  const auto c_e = y.segment(d, d);
  const Complex d_minus = y(2 * d);
  const Complex d_plus = opts_.neglect_d_plus ? Complex{0, 0} : Complex(y(2 * d + 1));

  auto dc_g = dydt.segment(0, d);
  auto dc_e = dydt.segment(d, d);

  // Trap energies plus the clock drive with its recoil kick e^{i k_c z}.
  dc_e = -kI * (n_omega_.array() * c_e.array()).matrix();
  dc_g = -kI * (n_omega_.array() * c_g.array()).matrix();
  if (drive.Omega != 0.0) {
    const Complex phase = std::exp(-kI * drive.delta * t);
    tmp_.noalias() = ops_.drive * c_g;
    dc_e -= kI * (0.5 * drive.Omega * phase) * tmp_;
    tmp_.noalias() = ops_.drive.adjoint() * c_e;
    dc_g -= kI * (0.5 * drive.Omega * std::conj(phase)) * tmp_;
  }

  // Moments feeding the field equations.
  re_ = c_g.real();
  im_ = c_g.imag();
  mre_.noalias() = ops_.sin_2kL * re_;
  mim_.noalias() = ops_.sin_2kL * im_;
  double s2 = re_.dot(mre_) + im_.dot(mim_);
  mre_.noalias() = ops_.cos_2kL * re_;
  mim_.noalias() = ops_.cos_2kL * im_;
  double c2 = re_.dot(mre_) + im_.dot(mim_);
  double norm = re_.squaredNorm() + im_.squaredNorm();
  re_ = c_e.real();
  im_ = c_e.imag();
  mre_.noalias() = ops_.sin_2kL * re_;
  mim_.noalias() = ops_.sin_2kL * im_;
  s2 += re_.dot(mre_) + im_.dot(mim_);
  mre_.noalias() = ops_.cos_2kL * re_;
  mim_.noalias() = ops_.cos_2kL * im_;
  c2 += re_.dot(mre_) + im_.dot(mim_);
  norm += re_.squaredNorm() + im_.squaredNorm();
  const double s_mom = 0.5 * (norm - c2);
  const double c_mom = 0.5 * (norm + c2);

  const double g0 = params_.g0;
  const Complex beta_tot = params_.beta_plus + d_plus;

  if (opts_.include_atom_backaction) {
    // The interference bracket is purely imaginary, so this term only stirs
    // phases within the lattice potential; it cannot change the norm.
    const Complex bracket =
        std::conj(beta_tot) * d_minus - beta_tot * std::conj(d_minus);
    re_ = c_e.real();
    im_ = c_e.imag();
    mre_.noalias() = ops_.sin_2kL * re_;
    mim_.noalias() = ops_.sin_2kL * im_;
    dc_e += (g0 * bracket) * (mre_ + kI * mim_);
    re_ = c_g.real();
    im_ = c_g.imag();
    mre_.noalias() = ops_.sin_2kL * re_;
    mim_.noalias() = ops_.sin_2kL * im_;
    dc_g += (g0 * bracket) * (mre_ + kI * mim_);
  }

  if (opts_.freeze_field) {
    dydt(2 * d) = Complex{0, 0};
    dydt(2 * d + 1) = Complex{0, 0};
    return;
  }

  dydt(2 * d) = (kI * (params_.Delta - 2.0 * g0 * s_mom) - 0.5 * params_.kappa) * d_minus -
                g0 * beta_tot * s2;

  if (opts_.neglect_d_plus) {
    dydt(2 * d + 1) = Complex{0, 0};
  } else {
    Complex dp = (kI * (params_.Delta - 2.0 * g0 * c_mom) - 0.5 * params_.kappa) * d_plus +
                 g0 * d_minus * s2;
    if (opts_.include_C2_drift) {
      dp -= kI * g0 * (c2 - c2_reference_) * params_.beta_plus;
    }
    dydt(2 * d + 1) = dp;
  }
}

void MeanFieldModel::rhs(const MeanFieldState& state, const DriveParams& drive,
                         MeanFieldState& dstate) const {
  Eigen::VectorXcd y(flat_size()), dy(flat_size());
  pack(state, y);
  rhs_flat(state.t, y, drive, dy);
  unpack(dy, state.t, dstate);
}

}  // namespace lclock
