#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "modbot/transport/channel.hpp"
#include "modbot/transport/scheduler.hpp"

namespace modbot::transport {

class MqttBridge;

struct BusLogEntry {
  std::int64_t send_us = 0;
  std::int64_t deliver_us = -1;  ///< -1 when the channel dropped the message
  std::string topic;
  std::string payload;
};

/// Topic-based publish/subscribe over a lossy channel; deliveries become
/// events on the shared virtual-clock queue.
class Bus {
 public:
  using Handler = std::function<void(std::string_view payload)>;

  Bus(EventQueue& events, Channel& channel) : events_(events), channel_(channel) {}

  void subscribe(const std::string& topic, Handler handler);

  /// Sends at the current virtual time. `module_id` and `seq` order deliveries
  /// that land on the same timestamp.
  void publish(const std::string& topic, std::string payload, int module_id, std::int64_t seq);

  /// Mirrors every publish to a broker; pass nullptr to detach.
  void attach_bridge(MqttBridge* bridge) { bridge_ = bridge; }

  const std::vector<BusLogEntry>& log() const { return log_; }
  std::int64_t delivered() const { return delivered_; }

 private:
  EventQueue& events_;
  Channel& channel_;
  MqttBridge* bridge_ = nullptr;
  std::map<std::string, std::vector<Handler>> subscribers_;
  std::vector<BusLogEntry> log_;
  std::int64_t delivered_ = 0;
};

}  // namespace modbot::transport
