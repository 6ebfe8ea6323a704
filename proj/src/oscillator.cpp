#include "lclock/oscillator.hpp"

#include <cmath>
#include <complex>

#include "lclock/constants.hpp"
#include "lclock/errors.hpp"

namespace lclock {

namespace {

// Associated Laguerre L_k^{(alpha)}(x) by the standard three-term recurrence.
double laguerre(int k, int alpha, double x) {
  if (k == 0) return 1.0;
  double prev = 1.0;
  double cur = 1.0 + alpha - x;
  for (int j = 2; j <= k; ++j) {
    const double next = ((2.0 * j - 1.0 + alpha - x) * cur - (j - 1.0 + alpha) * prev) / j;
    prev = cur;
    cur = next;
  }
  return cur;
}

// |<n| e^{ikz} |n'>| for n >= n': e^{-eta^2/2} sqrt(n'!/n!) eta^m L_{n'}^{(m)}(eta^2)
// with eta = k a / sqrt(2), m = n - n'. The full element is this times i^m.
double displacement_magnitude(int n, int n_prime, double eta) {
  const int m = n - n_prime;
  const double log_fact = 0.5 * (std::lgamma(n_prime + 1.0) - std::lgamma(n + 1.0));
  return std::exp(-0.5 * eta * eta + log_fact) * std::pow(eta, m) *
         laguerre(n_prime, m, eta * eta);
}

void check_levels(int n_max) {
  if (n_max < 0) throw ConfigError("n_max must be >= 0");
}

}  // namespace

Eigen::MatrixXcd displacement_matrix(double k_times_a, int n_max) {
  check_levels(n_max);
  const int dim = n_max + 1;
  const double eta = k_times_a / std::sqrt(2.0);
  static const std::complex<double> i_pow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  Eigen::MatrixXcd d(dim, dim);
  for (int n = 0; n < dim; ++n) {
    for (int np = 0; np <= n; ++np) {
      const std::complex<double> v =
          displacement_magnitude(n, np, eta) * i_pow[(n - np) % 4];
      d(n, np) = v;
      d(np, n) = v;  // e^{ikz} is symmetric between real basis functions
    }
  }
  return d;
}

TrigPair trig_matrices(double k_times_a, int n_max) {
  check_levels(n_max);
  const int dim = n_max + 1;
  const double eta = k_times_a / std::sqrt(2.0);
  TrigPair out;
  out.sin = Eigen::MatrixXd::Zero(dim, dim);
  out.cos = Eigen::MatrixXd::Zero(dim, dim);
  for (int n = 0; n < dim; ++n) {
    for (int np = 0; np <= n; ++np) {
      const int m = n - np;
      const double r = displacement_magnitude(n, np, eta);
      if (m % 2 == 0) {
        // i^m is real here, so the element belongs to cos(kz).
        const double v = (m % 4 == 0) ? r : -r;
        out.cos(n, np) = v;
        out.cos(np, n) = v;
      } else {
        const double v = (m % 4 == 1) ? r : -r;
        out.sin(n, np) = v;
        out.sin(np, n) = v;
      }
    }
  }
  return out;
}

Eigen::MatrixXd position_matrix(double a_osc, int n_max) {
  check_levels(n_max);
  const int dim = n_max + 1;
  Eigen::MatrixXd z = Eigen::MatrixXd::Zero(dim, dim);
  const double scale = a_osc / std::sqrt(2.0);
  for (int n = 0; n + 1 < dim; ++n) {
    z(n, n + 1) = scale * std::sqrt(n + 1.0);
    z(n + 1, n) = z(n, n + 1);
  }
  return z;
}

Eigen::MatrixXcd momentum_matrix(double a_osc, int n_max) {
  check_levels(n_max);
  const int dim = n_max + 1;
  Eigen::MatrixXcd p = Eigen::MatrixXcd::Zero(dim, dim);
  const double scale = kHbar / (std::sqrt(2.0) * a_osc);
  for (int n = 0; n + 1 < dim; ++n) {
    p(n + 1, n) = std::complex<double>(0.0, scale * std::sqrt(n + 1.0));
    p(n, n + 1) = -p(n + 1, n);
  }
  return p;
}

OperatorSet build_operator_set(const DerivedParams& params, int n_max) {
  check_levels(n_max);
  OperatorSet ops;
  ops.n_max = n_max;
  ops.drive = displacement_matrix(params.eta_c, n_max);
  TrigPair trig = trig_matrices(2.0 * params.eta_L, n_max);
  ops.sin_2kL = std::move(trig.sin);
  ops.cos_2kL = std::move(trig.cos);
  const int dim = n_max + 1;
  ops.cos_sq = 0.5 * (Eigen::MatrixXd::Identity(dim, dim) + ops.cos_2kL);
  ops.sin_sq = 0.5 * (Eigen::MatrixXd::Identity(dim, dim) - ops.cos_2kL);
  ops.z = position_matrix(params.a_osc, n_max);
  ops.p = momentum_matrix(params.a_osc, n_max);
  return ops;
}

}  // namespace lclock
