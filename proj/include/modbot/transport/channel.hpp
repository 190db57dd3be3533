#pragma once

#include <cstdint>
#include <optional>

#include "modbot/common/rng.hpp"

namespace modbot::transport {

/// Fault model of the simulated wireless link.
struct ChannelConfig {
  double loss_probability = 0.0;  ///< in [0, 1)
  double latency_ms = 5.0;
  double jitter_ms = 0.0;  ///< uniform half-width around latency_ms
  std::uint64_t seed = 1;
  /// Messages sent at or after this virtual time are never dropped.
  std::optional<double> loss_until_ms;

  void validate() const;
};

/// At-most-once lossy link. Every send consumes exactly two draws from the
/// seeded stream (loss, jitter), so the fault sequence depends only on the
/// seed and the number of messages sent.
class Channel {
 public:
  explicit Channel(ChannelConfig config);

  const ChannelConfig& config() const { return config_; }

  /// Delivery time in microseconds, or nullopt when the message is dropped.
  std::optional<std::int64_t> deliver(std::int64_t send_time_us);

  std::int64_t sent() const { return sent_; }
  std::int64_t dropped() const { return dropped_; }

 private:
  ChannelConfig config_;
  DeterministicRng rng_;
  std::int64_t sent_ = 0;
  std::int64_t dropped_ = 0;
};

}  // namespace modbot::transport
