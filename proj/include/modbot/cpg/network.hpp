#pragma once

#include <vector>

#include <Eigen/Dense>

#include "modbot/cpg/operators.hpp"

namespace modbot::cpg {

inline constexpr double kDefaultMu = 5.0;
inline constexpr double kDefaultAmplitudeRate = 20.0;
inline constexpr double kDefaultDt = 0.002;

/// Constants of one module's oscillator network.
struct OscillatorNetworkParams {
  int n = 0;
  Eigen::VectorXd omega;      ///< natural frequency per oscillator, rad/s (n)
  Eigen::VectorXd mu;         ///< phase convergence gains (n-1)
  Eigen::VectorXd a;          ///< amplitude convergence rates, 1/s (n)
  Eigen::VectorXd amplitude;  ///< desired amplitudes R, rad (n)
  Eigen::VectorXd offset;     ///< constant offsets C, rad (n)
  Eigen::VectorXd theta_des;  ///< desired phase differences, rad (n-1)
  bool enforce_joint_limits = true;

  /// Uniform omega, default gains, zero amplitude/offset/phase differences.
  static OscillatorNetworkParams with_defaults(int n, double omega);

  /// Throws InvalidDimension / InvalidParameter on a broken invariant.
  void validate() const;
};

struct NetworkState {
  Eigen::VectorXd phi;    ///< unwrapped phases
  Eigen::VectorXd r;      ///< amplitudes
  Eigen::VectorXd r_dot;  ///< amplitude rates
  double t = 0.0;

  static NetworkState zero(int n);
  bool finite() const;
};

enum class InjectionMode {
  kFirstOscillator,  ///< pull acts on oscillator 1 only
  kRowMean,          ///< same pull on every oscillator, driven by the row mean
};

/// Proportional pull of the network toward an external reference phase that
/// moves linearly from `phase_start` to `phase_end` over the step.
struct ReferencePull {
  double gamma = 0.0;
  double phase_start = 0.0;
  double phase_end = 0.0;
  InjectionMode mode = InjectionMode::kFirstOscillator;
};

struct JointOutput {
  Eigen::VectorXd q;
  std::vector<int> clamped_joints;  ///< zero-based joints that hit the limit
};

class OscillatorNetwork {
 public:
  explicit OscillatorNetwork(OscillatorNetworkParams params);

  const OscillatorNetworkParams& params() const { return params_; }
  const CouplingOperators& operators() const { return ops_; }
  int size() const { return params_.n; }

  /// omega + A_eff phi + B_eff theta_des.
  Eigen::VectorXd phase_rate(const Eigen::VectorXd& phi) const;

  /// Advances phases and amplitudes by one RK4 step. Throws NumericDivergence
  /// when the result is not finite.
  NetworkState step(const NetworkState& state, double dt,
                    const ReferencePull* pull = nullptr) const;

  /// q_i = r_i sin(phi_i) + C_i, clamped to the joint range when enabled.
  JointOutput output(const NetworkState& state) const;

  /// V(psi) with psi = S T phi and psi_des = S theta_des.
  double potential(const NetworkState& state) const;

  /// wrap(T phi - theta_des), componentwise.
  Eigen::VectorXd phase_error(const NetworkState& state) const;

 private:
  Eigen::VectorXd derivative(double tau, const Eigen::VectorXd& y, double dt,
                             const ReferencePull* pull) const;

  OscillatorNetworkParams params_;
  CouplingOperators ops_;
  Eigen::VectorXd drift_;  // omega + B_eff theta_des
  Eigen::VectorXd psi_des_;
};

NetworkState step(const NetworkState& state, const OscillatorNetworkParams& params, double dt);
JointOutput output(const NetworkState& state, const OscillatorNetworkParams& params);

/// Exact solution of r'' = a[(a/4)(R - r) - r'] (double pole at -a/2).
double amplitude_closed_form(double r0, double r_dot0, double target, double a, double t);

}  // namespace modbot::cpg
