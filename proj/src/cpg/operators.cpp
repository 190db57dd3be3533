#include "modbot/cpg/operators.hpp"

#include <stdexcept>
#include <string>

#include "modbot/common/errors.hpp"

namespace modbot::cpg {

namespace {

void require_chain(int n) {
  if (n < 2) {
    throw InvalidDimension("oscillator chain needs n >= 2, got " + std::to_string(n));
  }
}

}  // namespace

Eigen::MatrixXd build_difference_matrix(int n) {
  require_chain(n);
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(n - 1, n);
  for (int i = 0; i < n - 1; ++i) {
    t(i, i) = 1.0;
    t(i, i + 1) = -1.0;
  }
  return t;
}

Eigen::MatrixXd build_psi_map(int n) {
  require_chain(n);
  const int k = n - 1;
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(k, k);
  s(0, 0) = 1.0;
  s(k - 1, k - 1) = 1.0;
  for (int i = 1; i < k - 1; ++i) {
    s(i, i - 1) = 1.0;
    s(i, i) = -1.0;
  }
  return s;
}

Eigen::VectorXd compute_psi(const Eigen::VectorXd& theta) {
  if (theta.size() < 1) {
    throw InvalidDimension("phase-difference vector must be non-empty");
  }
  return build_psi_map(static_cast<int>(theta.size()) + 1) * theta;
}

double potential(const Eigen::VectorXd& psi, const Eigen::VectorXd& psi_des,
                 const Eigen::VectorXd& mu) {
  if (psi.size() != psi_des.size() || psi.size() != mu.size()) {
    throw InvalidDimension("potential: psi, psi_des and mu must have equal length");
  }
  return (mu.array() * (psi - psi_des).array().square()).sum();
}

CouplingOperators build_coupling(int n, const Eigen::VectorXd& mu) {
  require_chain(n);
  if (mu.size() != n - 1) {
    throw InvalidDimension("mu must have length n-1 = " + std::to_string(n - 1));
  }
  if ((mu.array() <= 0.0).any()) {
    throw InvalidParameter("all convergence coefficients mu must be > 0");
  }

  CouplingOperators ops;
  ops.difference = build_difference_matrix(n);
  ops.psi_map = build_psi_map(n);

  const Eigen::MatrixXd& t = ops.difference;
  ops.t_pinv = t.transpose() * (t * t.transpose()).inverse();

  Eigen::FullPivLU<Eigen::MatrixXd> s_lu(ops.psi_map);
  if (!s_lu.isInvertible()) {
    throw std::logic_error("psi map is singular");
  }
  // S^-1 M S, the pull-back of the gradient from psi to theta coordinates.
  const Eigen::MatrixXd theta_gain = s_lu.solve(mu.asDiagonal() * ops.psi_map);

  ops.b_eff = 2.0 * ops.t_pinv * theta_gain;
  ops.a_eff = -ops.b_eff * t;
  return ops;
}

}  // namespace modbot::cpg
