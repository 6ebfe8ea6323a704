#pragma once

#include <Eigen/Dense>

#include "lclock/params.hpp"

namespace lclock {

// All matrices live on levels 0..n_max inclusive, so they are
// (n_max + 1) x (n_max + 1).

// <n| e^{i k z} |n'>, which depends on k only through k * a_osc. Complex
// symmetric (not Hermitian); unitary up to truncation error in the
// upper-left block.
Eigen::MatrixXcd displacement_matrix(double k_times_a, int n_max);

struct TrigPair {
  Eigen::MatrixXd sin;  // odd parity: entries with n + n' even are exact zeros
  Eigen::MatrixXd cos;  // even parity: entries with n + n' odd are exact zeros
};

// sin(k z) and cos(k z) as exactly symmetric real matrices, equal to the
// anti-Hermitian/Hermitian parts of displacement_matrix(k_times_a).
TrigPair trig_matrices(double k_times_a, int n_max);

// z in meters and p in kg m / s, from the ladder operators.
Eigen::MatrixXd position_matrix(double a_osc, int n_max);
Eigen::MatrixXcd momentum_matrix(double a_osc, int n_max);

// The fixed set the dynamics consumes, evaluated at the derived geometry.
struct OperatorSet {
  int n_max = 0;
  Eigen::MatrixXcd drive;    // e^{i k_c z}, clock-pulse momentum kick
  Eigen::MatrixXd sin_2kL;   // sin(2 k_L z), sideband source overlap
  Eigen::MatrixXd cos_2kL;   // cos(2 k_L z)
  Eigen::MatrixXd cos_sq;    // cos^2(k_L z) = (1 + cos 2 k_L z) / 2
  Eigen::MatrixXd sin_sq;    // sin^2(k_L z)
  Eigen::MatrixXd z;         // meters
  Eigen::MatrixXcd p;        // kg m / s
};

OperatorSet build_operator_set(const DerivedParams& params, int n_max);

}  // namespace lclock
