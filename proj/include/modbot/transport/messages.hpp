#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace modbot::transport {

inline constexpr int kJoints = 5;
using JointVector = std::array<double, kJoints>;

/// One master-to-slave trajectory chunk. Samples are half-open: they cover
/// [start, start + size * period) and the end instant belongs to the next
/// segment.
struct TrajectorySegmentMessage {
  int module_id = 0;
  std::int64_t seq = 0;
  std::int64_t start_time_ms = 0;
  std::int64_t sample_period_ms = 0;
  std::vector<JointVector> samples;

  std::int64_t duration_ms() const {
    return static_cast<std::int64_t>(samples.size()) * sample_period_ms;
  }
  std::int64_t end_time_ms() const { return start_time_ms + duration_ms(); }
  bool operator==(const TrajectorySegmentMessage&) const = default;
};

/// Slave-to-master feedback.
struct StatusMessage {
  int module_id = 0;
  std::int64_t last_seq_applied = -1;  ///< -1 before any segment was applied
  std::int64_t buffer_depth = 0;
  std::int64_t clock_ms = 0;
  bool operator==(const StatusMessage&) const = default;
};

inline std::string trajectory_topic(int module_id) {
  return "modules/" + std::to_string(module_id) + "/traj";
}
inline std::string status_topic(int module_id) {
  return "modules/" + std::to_string(module_id) + "/status";
}

}  // namespace modbot::transport
