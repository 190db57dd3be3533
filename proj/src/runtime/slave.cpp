#include "modbot/runtime/slave.hpp"

#include "modbot/common/errors.hpp"
#include "modbot/transport/codec.hpp"

namespace modbot::runtime {

Slave::Slave(SlaveConfig config)
    : config_(config), buffer_(config.module_id, config.capacity, config.initial_pose) {
  if (config_.timer_period_ms <= 0) throw InvalidParameter("timer period must be > 0 ms");
}

IngestOutcome Slave::on_payload(std::string_view payload, double clock_ms) {
  TrajectorySegmentMessage msg;
  try {
    msg = transport::decode(payload);
  } catch (const ParseError&) {
    ++malformed_;
    return IngestOutcome::kMalformed;
  }
  return on_segment(msg, clock_ms);
}

IngestOutcome Slave::on_segment(const TrajectorySegmentMessage& msg, double clock_ms) {
  return buffer_.ingest(msg, clock_ms);
}

const SlaveTraceRow& Slave::on_timer(std::int64_t t_ms) {
  const SampleResult s = buffer_.sample(static_cast<double>(t_ms));
  if (s.held) ++holds_;
  SlaveTraceRow row;
  row.t_ms = t_ms;
  row.q = s.q;
  row.command = to_servo_command(s.q);
  row.seq_active = s.seq;
  row.holds = holds_;
  trace_.push_back(row);
  return trace_.back();
}

transport::StatusMessage Slave::status(std::int64_t clock_ms) const {
  return transport::StatusMessage{config_.module_id, buffer_.last_seq_applied(),
                                  static_cast<std::int64_t>(buffer_.depth()), clock_ms};
}

}  // namespace modbot::runtime
