#pragma once

#include <cstdint>
#include <vector>

#include "modbot/runtime/slave.hpp"
#include "modbot/sim/direct_run.hpp"
#include "modbot/transport/bus.hpp"
#include "modbot/transport/channel.hpp"
#include "modbot/transport/master.hpp"

namespace modbot::transport {
class MqttBridge;
}

namespace modbot::sim {

struct NetworkedRunOptions {
  DirectRunOptions base;
  transport::ChannelConfig channel;
  std::int64_t horizon_ms = 50;
  std::int64_t sample_period_ms = 10;
  std::int64_t timer_period_ms = 10;
  std::int64_t status_period_ms = 50;
  std::size_t capacity = runtime::kDefaultCapacity;
  transport::MqttBridge* bridge = nullptr;
};

/// Slave playback against the dense offline trajectory. Playback at virtual
/// time t is compared with the reference at simulation time t - horizon.
struct InterpolationReport {
  double max_error = 0.0;   ///< over probes that had bracketing data
  double max_qddot = 0.0;   ///< from second differences of the reference
  double bound = 0.0;       ///< (sample_period^2 / 8) * max_qddot
  std::int64_t probes = 0;
  std::int64_t held_probes = 0;
};

/// Behaviour once the channel stops dropping (ChannelConfig::loss_until_ms).
struct RecoveryReport {
  bool applicable = false;
  double recovered_from_ms = 0.0;  ///< loss end + 2 horizons
  double max_error = 0.0;
  std::int64_t probes = 0;
  std::int64_t held_probes = 0;
  bool gap_free = true;
};

struct NetworkedRunResult {
  DirectRunResult reference;
  std::vector<std::vector<runtime::SlaveTraceRow>> slave_traces;
  std::vector<transport::BusLogEntry> log;

  std::int64_t segments_sent = 0;
  std::int64_t messages_sent = 0;
  std::int64_t messages_dropped = 0;
  std::int64_t messages_delivered = 0;
  std::int64_t stale_dropped = 0;
  std::int64_t overflow_dropped = 0;
  std::int64_t duplicates = 0;
  std::int64_t malformed = 0;
  std::int64_t holds = 0;
  std::int64_t status_received = 0;
  std::int64_t master_clamps = 0;
  std::int64_t out_of_range_pulses = 0;
  std::int64_t out_of_range_angles = 0;
  /// Applied seq sequence per module never skips a segment.
  std::vector<bool> gap_free;

  InterpolationReport interpolation;
  RecoveryReport recovery;
};

/// Runs master, channel and slaves on one virtual-clock event queue next to
/// a dense offline run from the same initial state.
NetworkedRunResult run_networked(const hierarchy::HierarchicalSystem& system,
                                 const NetworkedRunOptions& options);

/// True when successive non-negative seq values differ by 0 or 1.
bool seq_gap_free(const std::vector<runtime::SlaveTraceRow>& rows, std::int64_t from_ms = 0);

}  // namespace modbot::sim
