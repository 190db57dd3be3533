#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <mutex>

#include "modbot/transport/messages.hpp"

namespace modbot::runtime {

using transport::JointVector;
using transport::TrajectorySegmentMessage;

inline constexpr std::size_t kDefaultCapacity = 64;

enum class IngestOutcome {
  kInserted,
  kDuplicate,        ///< seq already stored; buffer unchanged
  kStale,            ///< segment ended before the arrival clock; discarded
  kInsertedOverflow, ///< inserted, and the oldest unconsumed segment was dropped
  kRejectedOverflow, ///< buffer full and the arriving segment was the oldest
  kMalformed,        ///< payload failed to decode
};

struct SampleResult {
  JointVector q{};
  bool held = false;       ///< no bracketing data; q is the hold value
  std::int64_t seq = -1;   ///< segment that produced q, -1 when holding
};

/// Slave-side store of trajectory segments keyed by start time.
class TrajectoryBuffer {
 public:
  explicit TrajectoryBuffer(int module_id, std::size_t capacity = kDefaultCapacity,
                            JointVector initial_pose = {});

  /// Throws RoutingError when the segment is addressed to another module.
  IngestOutcome ingest(const TrajectorySegmentMessage& msg, double clock_ms);

  /// Linear interpolation at t_ms. Across a segment boundary the bracketing
  /// pair is the last sample of the earlier and the first of the later
  /// segment. Without data the last applied value is held. Segments that end
  /// at or before t_ms are evicted; t_ms must not decrease between calls.
  SampleResult sample(double t_ms);

  /// Same value as sample() would return, without consuming anything.
  SampleResult peek(double t_ms) const;

  int module_id() const { return module_id_; }
  std::size_t depth() const { return segments_.size(); }
  std::size_t capacity() const { return capacity_; }
  const JointVector& last_applied() const { return last_applied_; }
  std::int64_t last_seq_applied() const { return last_seq_applied_; }
  std::int64_t stale_dropped() const { return stale_dropped_; }
  std::int64_t overflow_dropped() const { return overflow_dropped_; }
  std::int64_t duplicates() const { return duplicates_; }

  /// Stored segments by start time (for inspection and tests).
  const std::map<std::int64_t, TrajectorySegmentMessage>& segments() const { return segments_; }

 private:
  int module_id_;
  std::size_t capacity_;
  std::map<std::int64_t, TrajectorySegmentMessage> segments_;
  JointVector last_applied_;
  std::int64_t last_seq_applied_ = -1;
  std::int64_t stale_dropped_ = 0;
  std::int64_t overflow_dropped_ = 0;
  std::int64_t duplicates_ = 0;
};

/// Single-writer / single-reader wrapper: ingest and sample each hold the lock
/// for one operation, so sample always sees a consistent buffer.
class SharedTrajectoryBuffer {
 public:
  explicit SharedTrajectoryBuffer(TrajectoryBuffer buffer) : buffer_(std::move(buffer)) {}

  IngestOutcome ingest(const TrajectorySegmentMessage& msg, double clock_ms) {
    std::lock_guard lock(mutex_);
    return buffer_.ingest(msg, clock_ms);
  }
  SampleResult sample(double t_ms) {
    std::lock_guard lock(mutex_);
    return buffer_.sample(t_ms);
  }
  std::size_t depth() const {
    std::lock_guard lock(mutex_);
    return buffer_.depth();
  }

 private:
  mutable std::mutex mutex_;
  TrajectoryBuffer buffer_;
};

}  // namespace modbot::runtime
