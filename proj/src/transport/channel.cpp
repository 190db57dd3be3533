#include "modbot/transport/channel.hpp"

#include <algorithm>
#include <cmath>

#include "modbot/common/errors.hpp"

namespace modbot::transport {

void ChannelConfig::validate() const {
  if (!(loss_probability >= 0.0 && loss_probability < 1.0)) {
    throw InvalidParameter("loss probability must lie in [0, 1)");
  }
  if (!(latency_ms >= 0.0) || !std::isfinite(latency_ms)) {
    throw InvalidParameter("latency must be >= 0 ms");
  }
  if (!(jitter_ms >= 0.0) || !std::isfinite(jitter_ms)) {
    throw InvalidParameter("jitter must be >= 0 ms");
  }
}

Channel::Channel(ChannelConfig config) : config_(config), rng_(config.seed) { config_.validate(); }

std::optional<std::int64_t> Channel::deliver(std::int64_t send_time_us) {
  ++sent_;
  const double u_loss = rng_.uniform();
  const double u_jitter = rng_.uniform();

  const bool loss_active =
      !config_.loss_until_ms || static_cast<double>(send_time_us) < *config_.loss_until_ms * 1000.0;
  if (loss_active && u_loss < config_.loss_probability) {
    ++dropped_;
    return std::nullopt;
  }
  const double delay_ms = config_.latency_ms + config_.jitter_ms * (2.0 * u_jitter - 1.0);
  const auto delay_us = static_cast<std::int64_t>(std::llround(delay_ms * 1000.0));
  return send_time_us + std::max<std::int64_t>(delay_us, 0);
}

}  // namespace modbot::transport
