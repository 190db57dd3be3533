#include "modbot/transport/master.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "modbot/common/errors.hpp"

namespace modbot::transport {

int steps_per_span(std::int64_t span_ms, double dt) {
  if (!(dt > 0.0)) throw InvalidParameter("dt must be > 0");
  const double ratio = static_cast<double>(span_ms) * 1e-3 / dt;
  const double steps = std::round(ratio);
  if (steps < 1.0 || std::abs(ratio - steps) > 1e-9 * std::max(1.0, ratio)) {
    throw InvalidParameter("dt = " + std::to_string(dt) + " s does not divide " +
                           std::to_string(span_ms) + " ms");
  }
  return static_cast<int>(steps);
}

Master::Master(hierarchy::HierarchicalSystem system, hierarchy::SystemState initial,
               MasterConfig config)
    : system_(std::move(system)), state_(std::move(initial)), config_(config) {
  if (config_.horizon_ms <= 0 || config_.sample_period_ms <= 0 ||
      config_.horizon_ms % config_.sample_period_ms != 0) {
    throw InvalidParameter("horizon must be a positive multiple of the sample period");
  }
  for (int j = 0; j < system_.modules(); ++j) {
    if (system_.module(j).size() != kJoints) {
      throw InvalidDimension("networked modules must have exactly 5 joints");
    }
  }
  steps_per_horizon_ = steps_per_span(config_.horizon_ms, config_.dt);
  steps_per_sample_ = steps_per_span(config_.sample_period_ms, config_.dt);
  latest_status_.resize(system_.modules());
  for (int j = 0; j < system_.modules(); ++j) latest_status_[j].module_id = j;
}

std::vector<TrajectorySegmentMessage> Master::tick(std::int64_t clock_ms) {
  if (clock_ms != ticks_ * config_.horizon_ms) {
    throw std::logic_error("master tick at " + std::to_string(clock_ms) + " ms, expected " +
                           std::to_string(ticks_ * config_.horizon_ms) + " ms");
  }
  const int m = system_.modules();
  std::vector<TrajectorySegmentMessage> out(m);
  for (int j = 0; j < m; ++j) {
    out[j].module_id = j;
    out[j].seq = ticks_;
    out[j].start_time_ms = clock_ms + config_.horizon_ms;
    out[j].sample_period_ms = config_.sample_period_ms;
  }
  for (int step = 0; step < steps_per_horizon_; ++step) {
    if (step % steps_per_sample_ == 0) {
      for (int j = 0; j < m; ++j) {
        const auto q = system_.module(j).output(state_.modules[j]);
        clamped_ += static_cast<std::int64_t>(q.clamped_joints.size());
        JointVector sample{};
        for (int k = 0; k < kJoints; ++k) sample[k] = q.q[k];
        out[j].samples.push_back(sample);
      }
    }
    state_ = system_.step(state_, config_.dt);
  }
  ++ticks_;
  return out;
}

void Master::on_status(const StatusMessage& status) {
  if (status.module_id < 0 || status.module_id >= static_cast<int>(latest_status_.size())) {
    throw RoutingError("status from unknown module " + std::to_string(status.module_id));
  }
  ++status_received_;
  auto& slot = latest_status_[status.module_id];
  if (status.clock_ms >= slot.clock_ms) slot = status;
}

}  // namespace modbot::transport
