#pragma once

#include <cstdint>
#include <vector>

#include "modbot/hierarchy/system.hpp"
#include "modbot/transport/messages.hpp"

namespace modbot::transport {

struct MasterConfig {
  std::int64_t horizon_ms = 50;  ///< 20 Hz
  std::int64_t sample_period_ms = 10;
  double dt = 0.002;  ///< integration sub-step, s
};

/// Trajectory producer. Each tick integrates one horizon and emits one
/// segment per module, stamped one horizon ahead so slaves interpolate into
/// data they already hold: the sample computed for simulation time s plays at
/// virtual time s + horizon.
class Master {
 public:
  Master(hierarchy::HierarchicalSystem system, hierarchy::SystemState initial, MasterConfig config);

  /// Must be called with clock_ms = 0, horizon, 2 * horizon, ...
  std::vector<TrajectorySegmentMessage> tick(std::int64_t clock_ms);

  const hierarchy::SystemState& state() const { return state_; }
  const MasterConfig& config() const { return config_; }
  std::int64_t ticks() const { return ticks_; }
  /// Joint samples clamped to the joint range before sending.
  std::int64_t clamped_samples() const { return clamped_; }

  void on_status(const StatusMessage& status);
  const std::vector<StatusMessage>& latest_status() const { return latest_status_; }
  std::int64_t status_received() const { return status_received_; }

 private:
  hierarchy::HierarchicalSystem system_;
  hierarchy::SystemState state_;
  MasterConfig config_;
  int steps_per_horizon_ = 0;
  int steps_per_sample_ = 0;
  std::int64_t ticks_ = 0;
  std::int64_t clamped_ = 0;
  std::vector<StatusMessage> latest_status_;
  std::int64_t status_received_ = 0;
};

/// Integer number of dt steps spanning `span_ms`; throws InvalidParameter
/// when dt does not divide the span.
int steps_per_span(std::int64_t span_ms, double dt);

}  // namespace modbot::transport
