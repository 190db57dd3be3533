#include "modbot/cpg/network.hpp"

#include <cmath>
#include <string>

#include "modbot/common/angles.hpp"
#include "modbot/common/errors.hpp"
#include "modbot/cpg/rk4.hpp"

namespace modbot::cpg {

namespace {

void require_length(const Eigen::VectorXd& v, Eigen::Index len, const char* name) {
  if (v.size() != len) {
    throw InvalidDimension(std::string(name) + " must have length " + std::to_string(len) +
                           ", got " + std::to_string(v.size()));
  }
}

}  // namespace

OscillatorNetworkParams OscillatorNetworkParams::with_defaults(int n, double omega) {
  if (n < 2) throw InvalidDimension("oscillator network needs n >= 2");
  OscillatorNetworkParams p;
  p.n = n;
  p.omega = Eigen::VectorXd::Constant(n, omega);
  p.mu = Eigen::VectorXd::Constant(n - 1, kDefaultMu);
  p.a = Eigen::VectorXd::Constant(n, kDefaultAmplitudeRate);
  p.amplitude = Eigen::VectorXd::Zero(n);
  p.offset = Eigen::VectorXd::Zero(n);
  p.theta_des = Eigen::VectorXd::Zero(n - 1);
  return p;
}

void OscillatorNetworkParams::validate() const {
  if (n < 2) throw InvalidDimension("oscillator network needs n >= 2");
  require_length(omega, n, "omega");
  require_length(mu, n - 1, "mu");
  require_length(a, n, "a");
  require_length(amplitude, n, "amplitude");
  require_length(offset, n, "offset");
  require_length(theta_des, n - 1, "theta_des");
  if ((mu.array() <= 0.0).any()) throw InvalidParameter("all mu must be > 0");
  if ((a.array() <= 0.0).any()) throw InvalidParameter("all amplitude rates a must be > 0");
  if (!omega.allFinite() || !amplitude.allFinite() || !offset.allFinite() ||
      !theta_des.allFinite() || !mu.allFinite() || !a.allFinite()) {
    throw InvalidParameter("network parameters must be finite");
  }
  if (enforce_joint_limits) {
    for (int i = 0; i < n; ++i) {
      if (std::abs(amplitude[i]) + std::abs(offset[i]) > kJointLimit + 1e-12) {
        throw InvalidParameter("joint " + std::to_string(i + 1) +
                               ": |R| + |C| exceeds the 3pi/4 joint range");
      }
    }
  }
}

NetworkState NetworkState::zero(int n) {
  NetworkState s;
  s.phi = Eigen::VectorXd::Zero(n);
  s.r = Eigen::VectorXd::Zero(n);
  s.r_dot = Eigen::VectorXd::Zero(n);
  return s;
}

bool NetworkState::finite() const {
  return phi.allFinite() && r.allFinite() && r_dot.allFinite() && std::isfinite(t);
}

OscillatorNetwork::OscillatorNetwork(OscillatorNetworkParams params) : params_(std::move(params)) {
  params_.validate();
  for (Eigen::Index i = 0; i < params_.theta_des.size(); ++i) {
    params_.theta_des[i] = wrap_angle(params_.theta_des[i]);
  }
  ops_ = build_coupling(params_.n, params_.mu);
  drift_ = params_.omega + ops_.b_eff * params_.theta_des;
  psi_des_ = ops_.psi_map * params_.theta_des;
}

Eigen::VectorXd OscillatorNetwork::phase_rate(const Eigen::VectorXd& phi) const {
  return drift_ + ops_.a_eff * phi;
}

// Packed layout: [phi (n) | r (n) | r_dot (n)]; tau is the time inside the step.
Eigen::VectorXd OscillatorNetwork::derivative(double tau, const Eigen::VectorXd& y, double dt,
                                              const ReferencePull* pull) const {
  const int n = params_.n;
  const auto phi = y.segment(0, n);
  const auto r = y.segment(n, n);
  const auto r_dot = y.segment(2 * n, n);

  Eigen::VectorXd dy(3 * n);
  dy.segment(0, n) = drift_ + ops_.a_eff * phi;
  if (pull != nullptr && pull->gamma != 0.0) {
    const double reference =
        pull->phase_start + (pull->phase_end - pull->phase_start) * (tau / dt);
    if (pull->mode == InjectionMode::kFirstOscillator) {
      dy[0] += pull->gamma * wrap_angle(reference - phi[0]);
    } else {
      dy.segment(0, n).array() += pull->gamma * wrap_angle(reference - phi.mean());
    }
  }
  dy.segment(n, n) = r_dot;
  dy.segment(2 * n, n) = params_.a.array() *
                         (0.25 * params_.a.array() * (params_.amplitude - r).array() -
                          r_dot.array());
  return dy;
}

NetworkState OscillatorNetwork::step(const NetworkState& state, double dt,
                                     const ReferencePull* pull) const {
  if (!(dt > 0.0)) throw InvalidParameter("step size dt must be > 0");
  const int n = params_.n;
  require_length(state.phi, n, "phi");
  require_length(state.r, n, "r");
  require_length(state.r_dot, n, "r_dot");

  Eigen::VectorXd y(3 * n);
  y << state.phi, state.r, state.r_dot;
  const Eigen::VectorXd next = rk4_step(
      [&](double tau, const Eigen::VectorXd& v) { return derivative(tau, v, dt, pull); }, 0.0,
      y, dt);

  NetworkState out;
  out.phi = next.segment(0, n);
  out.r = next.segment(n, n);
  out.r_dot = next.segment(2 * n, n);
  out.t = state.t + dt;
  if (!out.finite()) {
    throw NumericDivergence("oscillator network diverged at t = " + std::to_string(state.t),
                            state.t);
  }
  return out;
}

JointOutput OscillatorNetwork::output(const NetworkState& state) const {
  JointOutput out;
  out.q = state.r.array() * state.phi.array().sin() + params_.offset.array();
  if (params_.enforce_joint_limits) {
    for (int i = 0; i < params_.n; ++i) {
      if (clamp_to_joint_limit(out.q[i])) out.clamped_joints.push_back(i);
    }
  }
  return out;
}

double OscillatorNetwork::potential(const NetworkState& state) const {
  const Eigen::VectorXd psi = ops_.psi_map * (ops_.difference * state.phi);
  return cpg::potential(psi, psi_des_, params_.mu);
}

Eigen::VectorXd OscillatorNetwork::phase_error(const NetworkState& state) const {
  Eigen::VectorXd e = ops_.difference * state.phi - params_.theta_des;
  for (Eigen::Index i = 0; i < e.size(); ++i) e[i] = wrap_angle(e[i]);
  return e;
}

NetworkState step(const NetworkState& state, const OscillatorNetworkParams& params, double dt) {
  return OscillatorNetwork(params).step(state, dt);
}

JointOutput output(const NetworkState& state, const OscillatorNetworkParams& params) {
  return OscillatorNetwork(params).output(state);
}

double amplitude_closed_form(double r0, double r_dot0, double target, double a, double t) {
  if (!(a > 0.0)) throw InvalidParameter("amplitude rate a must be > 0");
  if (t < 0.0) throw InvalidParameter("time must be >= 0");
  const double e0 = r0 - target;
  return target + std::exp(-0.5 * a * t) * (e0 + (0.5 * a * e0 + r_dot0) * t);
}

}  // namespace modbot::cpg
