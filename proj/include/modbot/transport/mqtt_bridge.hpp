#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace modbot::transport {

/// Pass-through publisher that mirrors simulated bus traffic to a real MQTT
/// 3.1.1 broker with QoS 0. The simulation never depends on it.
class MqttBridge {
 public:
  /// Connects and waits for CONNACK. Throws std::runtime_error on failure.
  MqttBridge(const std::string& host, std::uint16_t port, const std::string& client_id);
  ~MqttBridge();
  MqttBridge(const MqttBridge&) = delete;
  MqttBridge& operator=(const MqttBridge&) = delete;

  /// Reads MODBOT_MQTT_HOST / MODBOT_MQTT_PORT (default 1883); nullptr when
  /// the host variable is unset.
  static std::unique_ptr<MqttBridge> from_environment(const std::string& client_id);

  void publish(std::string_view topic, std::string_view payload);

  std::int64_t published() const { return published_; }

 private:
  void send_all(const std::vector<std::uint8_t>& bytes);

  int fd_ = -1;
  std::int64_t published_ = 0;
};

namespace mqtt {

std::vector<std::uint8_t> encode_remaining_length(std::size_t length);
std::vector<std::uint8_t> connect_packet(std::string_view client_id, std::uint16_t keep_alive_s);
std::vector<std::uint8_t> publish_packet(std::string_view topic, std::string_view payload);
std::vector<std::uint8_t> disconnect_packet();

}  // namespace mqtt

}  // namespace modbot::transport
