#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "modbot/runtime/pwm.hpp"
#include "modbot/runtime/trajectory_buffer.hpp"
#include "modbot/transport/messages.hpp"

namespace modbot::runtime {

struct SlaveConfig {
  int module_id = 0;
  std::int64_t timer_period_ms = 10;  ///< 100 Hz interpolation tick
  std::size_t capacity = kDefaultCapacity;
  JointVector initial_pose{};
};

/// One row of the per-module servo trace.
struct SlaveTraceRow {
  std::int64_t t_ms = 0;
  JointVector q{};
  ServoCommand command;
  std::int64_t seq_active = -1;
  std::int64_t holds = 0;  ///< cumulative timer ticks spent holding
};

/// Emulated module controller: decodes trajectory payloads into its buffer and
/// turns them into servo pulses on every timer tick.
class Slave {
 public:
  explicit Slave(SlaveConfig config);

  const SlaveConfig& config() const { return config_; }

  /// Decodes and ingests a wire payload. Malformed payloads are counted and
  /// ignored; a payload for another module raises RoutingError.
  IngestOutcome on_payload(std::string_view payload, double clock_ms);
  IngestOutcome on_segment(const TrajectorySegmentMessage& msg, double clock_ms);

  /// Timer tick: sample, map to PWM, append to the trace.
  const SlaveTraceRow& on_timer(std::int64_t t_ms);

  transport::StatusMessage status(std::int64_t clock_ms) const;

  const TrajectoryBuffer& buffer() const { return buffer_; }
  const std::vector<SlaveTraceRow>& trace() const { return trace_; }
  std::int64_t holds() const { return holds_; }
  std::int64_t malformed() const { return malformed_; }

 private:
  SlaveConfig config_;
  TrajectoryBuffer buffer_;
  std::vector<SlaveTraceRow> trace_;
  std::int64_t holds_ = 0;
  std::int64_t malformed_ = 0;
};

}  // namespace modbot::runtime
