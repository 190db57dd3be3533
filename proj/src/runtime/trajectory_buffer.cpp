#include "modbot/runtime/trajectory_buffer.hpp"

#include <cmath>
#include <string>

#include "modbot/common/errors.hpp"

namespace modbot::runtime {

TrajectoryBuffer::TrajectoryBuffer(int module_id, std::size_t capacity, JointVector initial_pose)
    : module_id_(module_id), capacity_(capacity), last_applied_(initial_pose) {
  if (capacity_ == 0) throw InvalidParameter("trajectory buffer capacity must be > 0");
}

IngestOutcome TrajectoryBuffer::ingest(const TrajectorySegmentMessage& msg, double clock_ms) {
  if (msg.module_id != module_id_) {
    throw RoutingError("segment for module " + std::to_string(msg.module_id) +
                       " delivered to module " + std::to_string(module_id_));
  }
  if (msg.samples.empty() || msg.sample_period_ms <= 0) {
    throw InvalidParameter("segment must have samples and a positive sample period");
  }
  for (const auto& [start, seg] : segments_) {
    if (seg.seq == msg.seq || start == msg.start_time_ms) {
      ++duplicates_;
      return IngestOutcome::kDuplicate;
    }
  }
  if (static_cast<double>(msg.end_time_ms()) < clock_ms) {
    ++stale_dropped_;
    return IngestOutcome::kStale;
  }
  if (segments_.size() < capacity_) {
    segments_.emplace(msg.start_time_ms, msg);
    return IngestOutcome::kInserted;
  }
  ++overflow_dropped_;
  if (msg.start_time_ms < segments_.begin()->first) return IngestOutcome::kRejectedOverflow;
  segments_.erase(segments_.begin());
  segments_.emplace(msg.start_time_ms, msg);
  return IngestOutcome::kInsertedOverflow;
}

SampleResult TrajectoryBuffer::peek(double t_ms) const {
  SampleResult held{last_applied_, true, -1};
  auto it = segments_.upper_bound(static_cast<std::int64_t>(std::floor(t_ms)));
  if (it == segments_.begin()) return held;
  --it;
  const auto& seg = it->second;
  const double offset = t_ms - static_cast<double>(seg.start_time_ms);
  if (offset < 0.0 || t_ms >= static_cast<double>(seg.end_time_ms())) return held;

  const double period = static_cast<double>(seg.sample_period_ms);
  const auto idx = static_cast<std::size_t>(std::floor(offset / period));
  const double frac = (offset - static_cast<double>(idx) * period) / period;
  const JointVector& a = seg.samples[idx];
  if (frac == 0.0) return {a, false, seg.seq};

  const JointVector* b = nullptr;
  if (idx + 1 < seg.samples.size()) {
    b = &seg.samples[idx + 1];
  } else {
    const auto next = std::next(it);
    if (next != segments_.end() && next->first == seg.end_time_ms()) b = &next->second.samples.front();
  }
  // Past the final sample with no successor: hold the last data point.
  if (b == nullptr) return {a, true, seg.seq};

  SampleResult out{{}, false, seg.seq};
  for (int k = 0; k < transport::kJoints; ++k) out.q[k] = a[k] + frac * ((*b)[k] - a[k]);
  return out;
}

SampleResult TrajectoryBuffer::sample(double t_ms) {
  const SampleResult out = peek(t_ms);
  while (!segments_.empty() &&
         static_cast<double>(segments_.begin()->second.end_time_ms()) <= t_ms) {
    segments_.erase(segments_.begin());
  }
  last_applied_ = out.q;
  if (out.seq >= 0) last_seq_applied_ = out.seq;
  return out;
}

}  // namespace modbot::runtime
