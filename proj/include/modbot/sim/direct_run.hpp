#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "modbot/hierarchy/system.hpp"

namespace modbot::sim {

inline constexpr double kConvergenceTolerance = 1e-3;

struct DirectRunOptions {
  double duration = 10.0;  ///< s
  double dt = 0.002;       ///< s
  /// Draw every phase (module and high level) uniformly from [-pi, pi].
  bool random_init = false;
  std::uint64_t seed = 1;
};

/// One row per integration step, t = 0 included.
struct ModuleTrace {
  std::vector<double> t;
  std::vector<Eigen::VectorXd> q;
  std::vector<Eigen::VectorXd> phi;
  std::vector<Eigen::VectorXd> r;
  std::vector<double> max_phase_error;  ///< max |wrap(T phi - theta_des)|
  std::vector<double> potential;
};

struct ModuleSummary {
  double terminal_potential = 0.0;
  double final_phase_error = 0.0;
  /// First time after which the phase error stays below 1e-3 rad.
  std::optional<double> convergence_time;
  std::int64_t clamps = 0;
  std::int64_t clamps_after_transient = 0;  ///< samples with t > 3 / min(a)
  double max_abs_q = 0.0;
};

struct DirectRunResult {
  double duration = 0.0;
  double dt = 0.0;
  std::int64_t steps = 0;
  std::vector<ModuleTrace> modules;
  std::vector<ModuleSummary> module_summary;
  hierarchy::ConstraintResiduals final_residuals;
  hierarchy::SystemState initial_state;
  hierarchy::SystemState final_state;
};

/// Zero state, or uniformly random phases when options.random_init is set.
hierarchy::SystemState make_initial_state(const hierarchy::HierarchicalSystem& system,
                                          const DirectRunOptions& options);

/// Integrates the full hierarchy for round(duration / dt) steps. Throws
/// InvalidParameter on bad options and NumericDivergence on blow-up.
DirectRunResult run_direct(const hierarchy::HierarchicalSystem& system,
                           const DirectRunOptions& options);

/// Residuals of the phase-matrix constraints for a system state.
hierarchy::ConstraintResiduals residuals_of(const hierarchy::HierarchicalSystem& system,
                                            const hierarchy::SystemState& state);

}  // namespace modbot::sim
