#pragma once

#include <Eigen/Dense>

namespace modbot::cpg {

/// Linear operators of the phase-gradient law for one chain of n oscillators.
///
///   difference  (n-1) x n     theta = T phi, theta_i = phi_i - phi_{i+1}
///   psi_map     (n-1) x (n-1) psi = S theta
///   t_pinv      n x (n-1)     T^T (T T^T)^-1
///   a_eff       n x n         -2 T+ S^-1 M S T
///   b_eff       n x (n-1)      2 T+ S^-1 M S
///
/// with M = diag(mu). The phase rate omega + a_eff phi + b_eff theta_des is the
/// pull-back of d(psi)/dt = -grad V through S and T, so it vanishes exactly when
/// T phi = theta_des.
struct CouplingOperators {
  Eigen::MatrixXd difference;
  Eigen::MatrixXd psi_map;
  Eigen::MatrixXd t_pinv;
  Eigen::MatrixXd a_eff;
  Eigen::MatrixXd b_eff;
};

/// Throws InvalidDimension for n < 2.
Eigen::MatrixXd build_difference_matrix(int n);

/// psi_1 = theta_1, psi_{n-1} = theta_{n-1}, psi_i = theta_{i-1} - theta_i
/// otherwise. Identity for n = 2 and n = 3.
Eigen::MatrixXd build_psi_map(int n);

Eigen::VectorXd compute_psi(const Eigen::VectorXd& theta);

/// V = sum mu_i (psi_i - psi_des_i)^2.
double potential(const Eigen::VectorXd& psi, const Eigen::VectorXd& psi_des,
                 const Eigen::VectorXd& mu);

/// Builds every operator for a chain with gains `mu` (length n-1, all > 0).
CouplingOperators build_coupling(int n, const Eigen::VectorXd& mu);

}  // namespace modbot::cpg
