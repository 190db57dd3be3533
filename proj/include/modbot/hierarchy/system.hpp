#pragma once

#include <vector>

#include <Eigen/Dense>

#include "modbot/cpg/network.hpp"

namespace modbot::hierarchy {

inline constexpr double kDefaultMuHigh = 5.0;
inline constexpr double kDefaultGamma = 2.0;

/// m modules chained under one high-level phase layer.
struct SystemConfig {
  std::vector<cpg::OscillatorNetworkParams> module_params;
  Eigen::VectorXd theta_high_des;  ///< desired delays Phi_{j} - Phi_{j+1} (m-1)
  Eigen::VectorXd mu_high;         ///< high-level gains (m-1)
  double gamma = kDefaultGamma;    ///< reference-phase injection gain, 1/s
  cpg::InjectionMode injection = cpg::InjectionMode::kFirstOscillator;

  int modules() const { return static_cast<int>(module_params.size()); }
  /// Shared natural frequency (module 1, oscillator 1).
  double omega() const;
  void validate() const;
};

struct SystemState {
  Eigen::VectorXd phi_high;  ///< one phase per module (m)
  std::vector<cpg::NetworkState> modules;
  double t = 0.0;
};

/// m x n matrix of all oscillator phases; row j is module j's phase vector.
struct PhaseMatrix {
  Eigen::MatrixXd values;
};

struct ConstraintResiduals {
  Eigen::MatrixXd intra;  ///< m x (n-1): wrap(P[j,k] - P[j,k+1] - theta_j,k)
  Eigen::MatrixXd inter;  ///< (m-1) x n, or (m-1) x 1 when partial
  /// Modules disagree on theta_des, so only column 1 can satisfy the row
  /// constraint and only that column is reported.
  bool partial = false;

  double max_intra() const;
  double max_inter() const;
};

/// Advances the high-level phases by the same gradient law as a module chain
/// (n := m). For m = 1 this is the free rotation Phi += omega dt.
Eigen::VectorXd step_high_level(const Eigen::VectorXd& phi_high,
                                const Eigen::VectorXd& theta_high_des, double omega,
                                const Eigen::VectorXd& mu_high, double dt);

/// Prebuilt operators for a whole system.
class HierarchicalSystem {
 public:
  explicit HierarchicalSystem(SystemConfig config);

  const SystemConfig& config() const { return config_; }
  int modules() const { return config_.modules(); }
  const cpg::OscillatorNetwork& module(int j) const { return modules_.at(j); }

  /// All phases, amplitudes and rates zero.
  SystemState initial_state() const;

  /// High-level step first, then one low-level step per module with the pull
  /// gamma * wrap(Phi_j - phi_j,1) following Phi_j linearly across the step.
  SystemState step(const SystemState& state, double dt) const;

  Eigen::VectorXd step_high_level(const Eigen::VectorXd& phi_high, double dt) const;

 private:
  SystemConfig config_;
  std::vector<cpg::OscillatorNetwork> modules_;
  std::vector<cpg::OscillatorNetwork> high_level_;  // empty for m = 1
};

SystemState step_system(const SystemState& state, const SystemConfig& config, double dt);

PhaseMatrix assemble_phase_matrix(const SystemState& state);

ConstraintResiduals constraint_residuals(const PhaseMatrix& phases,
                                         const std::vector<Eigen::VectorXd>& theta_des_per_module,
                                         const Eigen::VectorXd& theta_high_des);

}  // namespace modbot::hierarchy
