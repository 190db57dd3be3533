#include "modbot/sim/direct_run.hpp"

#include <cmath>

#include "modbot/common/angles.hpp"
#include "modbot/common/errors.hpp"
#include "modbot/common/rng.hpp"

namespace modbot::sim {

hierarchy::SystemState make_initial_state(const hierarchy::HierarchicalSystem& system,
                                          const DirectRunOptions& options) {
  auto state = system.initial_state();
  if (!options.random_init) return state;
  DeterministicRng rng(options.seed);
  for (auto& mod : state.modules) {
    for (Eigen::Index i = 0; i < mod.phi.size(); ++i) mod.phi[i] = rng.uniform(-kPi, kPi);
  }
  for (Eigen::Index j = 0; j < state.phi_high.size(); ++j) {
    state.phi_high[j] = rng.uniform(-kPi, kPi);
  }
  return state;
}

hierarchy::ConstraintResiduals residuals_of(const hierarchy::HierarchicalSystem& system,
                                            const hierarchy::SystemState& state) {
  std::vector<Eigen::VectorXd> theta;
  for (int j = 0; j < system.modules(); ++j) theta.push_back(system.module(j).params().theta_des);
  return hierarchy::constraint_residuals(hierarchy::assemble_phase_matrix(state), theta,
                                         system.config().theta_high_des);
}

DirectRunResult run_direct(const hierarchy::HierarchicalSystem& system,
                           const DirectRunOptions& options) {
  if (!(options.duration > 0.0) || !std::isfinite(options.duration)) {
    throw InvalidParameter("duration must be > 0");
  }
  if (!(options.dt > 0.0) || !std::isfinite(options.dt)) throw InvalidParameter("dt must be > 0");

  DirectRunResult res;
  res.duration = options.duration;
  res.dt = options.dt;
  res.steps = std::llround(options.duration / options.dt);
  if (res.steps < 1) throw InvalidParameter("duration must cover at least one step");

  const int m = system.modules();
  res.modules.resize(m);
  res.module_summary.resize(m);
  std::vector<double> transient_end(m);
  for (int j = 0; j < m; ++j) {
    transient_end[j] = 3.0 / system.module(j).params().a.minCoeff();
    auto& tr = res.modules[j];
    tr.t.reserve(res.steps + 1);
    tr.q.reserve(res.steps + 1);
    tr.phi.reserve(res.steps + 1);
    tr.r.reserve(res.steps + 1);
  }

  auto record = [&](const hierarchy::SystemState& s, double t) {
    for (int j = 0; j < m; ++j) {
      const auto& net = system.module(j);
      const auto& ms = s.modules[j];
      const auto out = net.output(ms);
      auto& tr = res.modules[j];
      auto& sum = res.module_summary[j];
      tr.t.push_back(t);
      tr.q.push_back(out.q);
      tr.phi.push_back(ms.phi);
      tr.r.push_back(ms.r);
      tr.max_phase_error.push_back(net.phase_error(ms).cwiseAbs().maxCoeff());
      tr.potential.push_back(net.potential(ms));
      const auto clamps = static_cast<std::int64_t>(out.clamped_joints.size());
      sum.clamps += clamps;
      if (t > transient_end[j]) sum.clamps_after_transient += clamps;
      sum.max_abs_q = std::max(sum.max_abs_q, out.q.cwiseAbs().maxCoeff());
    }
  };

  res.initial_state = make_initial_state(system, options);
  hierarchy::SystemState state = res.initial_state;
  record(state, 0.0);
  for (std::int64_t k = 0; k < res.steps; ++k) {
    state = system.step(state, options.dt);
    record(state, static_cast<double>(k + 1) * options.dt);
  }
  res.final_state = state;
  res.final_residuals = residuals_of(system, state);

  for (int j = 0; j < m; ++j) {
    const auto& tr = res.modules[j];
    auto& sum = res.module_summary[j];
    sum.terminal_potential = tr.potential.back();
    sum.final_phase_error = tr.max_phase_error.back();
    std::int64_t last_bad = -1;
    for (std::size_t k = 0; k < tr.max_phase_error.size(); ++k) {
      if (tr.max_phase_error[k] >= kConvergenceTolerance) last_bad = static_cast<std::int64_t>(k);
    }
    if (last_bad < static_cast<std::int64_t>(tr.t.size()) - 1) {
      sum.convergence_time = last_bad < 0 ? tr.t.front() : tr.t[last_bad + 1];
    }
  }
  return res;
}

}  // namespace modbot::sim
