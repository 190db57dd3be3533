#include "modbot/hierarchy/system.hpp"

#include <algorithm>
#include <string>

#include "modbot/common/angles.hpp"
#include "modbot/common/errors.hpp"

namespace modbot::hierarchy {

namespace {

cpg::OscillatorNetworkParams high_level_params(int m, double omega,
                                               const Eigen::VectorXd& theta_high_des,
                                               const Eigen::VectorXd& mu_high) {
  auto p = cpg::OscillatorNetworkParams::with_defaults(m, omega);
  p.mu = mu_high;
  p.theta_des = theta_high_des;
  p.enforce_joint_limits = false;
  return p;
}

cpg::NetworkState phase_only_state(const Eigen::VectorXd& phi) {
  auto s = cpg::NetworkState::zero(static_cast<int>(phi.size()));
  s.phi = phi;
  return s;
}

}  // namespace

double SystemConfig::omega() const {
  if (module_params.empty() || module_params.front().omega.size() == 0) {
    throw InvalidDimension("system has no modules");
  }
  return module_params.front().omega[0];
}

void SystemConfig::validate() const {
  const int m = modules();
  if (m < 1) throw InvalidDimension("system needs at least one module");
  const auto& first = module_params.front();
  for (const auto& p : module_params) {
    p.validate();
    if (p.n != first.n) throw InvalidDimension("all modules must share the oscillator count n");
    if (p.omega != first.omega) throw InvalidParameter("all modules must share omega");
  }
  if (theta_high_des.size() != m - 1) {
    throw InvalidDimension("high-level delays must have length m-1 = " + std::to_string(m - 1));
  }
  if (mu_high.size() != m - 1) {
    throw InvalidDimension("high-level gains must have length m-1 = " + std::to_string(m - 1));
  }
  if ((mu_high.array() <= 0.0).any()) throw InvalidParameter("all high-level mu must be > 0");
  if (!(gamma >= 0.0)) throw InvalidParameter("injection gain gamma must be >= 0");
}

double ConstraintResiduals::max_intra() const {
  return intra.size() == 0 ? 0.0 : intra.cwiseAbs().maxCoeff();
}

double ConstraintResiduals::max_inter() const {
  return inter.size() == 0 ? 0.0 : inter.cwiseAbs().maxCoeff();
}

Eigen::VectorXd step_high_level(const Eigen::VectorXd& phi_high,
                                const Eigen::VectorXd& theta_high_des, double omega,
                                const Eigen::VectorXd& mu_high, double dt) {
  const auto m = phi_high.size();
  if (m < 1) throw InvalidDimension("high-level phase vector is empty");
  if (theta_high_des.size() != m - 1 || mu_high.size() != m - 1) {
    throw InvalidDimension("high-level delays and gains must have length m-1");
  }
  if (!(dt > 0.0)) throw InvalidParameter("step size dt must be > 0");
  if (m == 1) return phi_high.array() + omega * dt;
  const cpg::OscillatorNetwork net(
      high_level_params(static_cast<int>(m), omega, theta_high_des, mu_high));
  return net.step(phase_only_state(phi_high), dt).phi;
}

HierarchicalSystem::HierarchicalSystem(SystemConfig config) : config_(std::move(config)) {
  config_.validate();
  for (Eigen::Index i = 0; i < config_.theta_high_des.size(); ++i) {
    config_.theta_high_des[i] = wrap_angle(config_.theta_high_des[i]);
  }
  modules_.reserve(config_.module_params.size());
  for (const auto& p : config_.module_params) modules_.emplace_back(p);
  if (config_.modules() >= 2) {
    high_level_.emplace_back(high_level_params(config_.modules(), config_.omega(),
                                               config_.theta_high_des, config_.mu_high));
  }
}

SystemState HierarchicalSystem::initial_state() const {
  SystemState s;
  s.phi_high = Eigen::VectorXd::Zero(modules());
  for (const auto& net : modules_) s.modules.push_back(cpg::NetworkState::zero(net.size()));
  return s;
}

Eigen::VectorXd HierarchicalSystem::step_high_level(const Eigen::VectorXd& phi_high,
                                                    double dt) const {
  if (phi_high.size() != modules()) throw InvalidDimension("high-level phase vector has wrong length");
  if (!(dt > 0.0)) throw InvalidParameter("step size dt must be > 0");
  if (high_level_.empty()) return phi_high.array() + config_.omega() * dt;
  return high_level_.front().step(phase_only_state(phi_high), dt).phi;
}

SystemState HierarchicalSystem::step(const SystemState& state, double dt) const {
  if (static_cast<int>(state.modules.size()) != modules()) {
    throw InvalidDimension("system state has the wrong module count");
  }
  SystemState next;
  next.phi_high = step_high_level(state.phi_high, dt);
  next.t = state.t + dt;
  next.modules.reserve(modules_.size());
  // A lone module has no inter-module constraint to serve; pulling it toward
  // a free-running reference would only slow its own convergence.
  const bool inject = modules() > 1;
  for (int j = 0; j < modules(); ++j) {
    const cpg::ReferencePull pull{config_.gamma, state.phi_high[j], next.phi_high[j],
                                  config_.injection};
    next.modules.push_back(modules_[j].step(state.modules[j], dt, inject ? &pull : nullptr));
  }
  return next;
}

SystemState step_system(const SystemState& state, const SystemConfig& config, double dt) {
  return HierarchicalSystem(config).step(state, dt);
}

PhaseMatrix assemble_phase_matrix(const SystemState& state) {
  const auto m = static_cast<Eigen::Index>(state.modules.size());
  if (m == 0) return {};
  const Eigen::Index n = state.modules.front().phi.size();
  PhaseMatrix p{Eigen::MatrixXd(m, n)};
  for (Eigen::Index j = 0; j < m; ++j) {
    if (state.modules[j].phi.size() != n) throw InvalidDimension("modules differ in oscillator count");
    p.values.row(j) = state.modules[j].phi.transpose();
  }
  return p;
}

ConstraintResiduals constraint_residuals(const PhaseMatrix& phases,
                                         const std::vector<Eigen::VectorXd>& theta_des_per_module,
                                         const Eigen::VectorXd& theta_high_des) {
  const Eigen::MatrixXd& p = phases.values;
  const Eigen::Index m = p.rows();
  const Eigen::Index n = p.cols();
  if (static_cast<Eigen::Index>(theta_des_per_module.size()) != m) {
    throw InvalidDimension("need one theta_des vector per module");
  }
  if (theta_high_des.size() != std::max<Eigen::Index>(m - 1, 0)) {
    throw InvalidDimension("high-level delays must have length m-1");
  }

  ConstraintResiduals res;
  res.intra.resize(m, std::max<Eigen::Index>(n - 1, 0));
  for (Eigen::Index j = 0; j < m; ++j) {
    if (theta_des_per_module[j].size() != n - 1) {
      throw InvalidDimension("theta_des for module " + std::to_string(j + 1) + " has wrong length");
    }
    for (Eigen::Index k = 0; k + 1 < n; ++k) {
      res.intra(j, k) = wrap_angle(p(j, k) - p(j, k + 1) - theta_des_per_module[j][k]);
    }
  }

  for (Eigen::Index j = 1; j < m && !res.partial; ++j) {
    for (Eigen::Index k = 0; k + 1 < n; ++k) {
      if (wrap_angle(theta_des_per_module[j][k]) != wrap_angle(theta_des_per_module[0][k])) {
        res.partial = true;
        break;
      }
    }
  }
  const Eigen::Index cols = res.partial ? std::min<Eigen::Index>(n, 1) : n;
  res.inter.resize(std::max<Eigen::Index>(m - 1, 0), cols);
  for (Eigen::Index j = 0; j + 1 < m; ++j) {
    for (Eigen::Index k = 0; k < cols; ++k) {
      res.inter(j, k) = wrap_angle(p(j, k) - p(j + 1, k) - theta_high_des[j]);
    }
  }
  return res;
}

}  // namespace modbot::hierarchy
