#include "modbot/transport/mqtt_bridge.hpp"

#include <netdb.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstdlib>
#include <cstring>
#include <stdexcept>

namespace modbot::transport {

namespace mqtt {

namespace {

void append_u16(std::vector<std::uint8_t>& out, std::size_t v) {
  out.push_back(static_cast<std::uint8_t>((v >> 8) & 0xFF));
  out.push_back(static_cast<std::uint8_t>(v & 0xFF));
}

void append_string(std::vector<std::uint8_t>& out, std::string_view s) {
  if (s.size() > 0xFFFF) throw std::invalid_argument("MQTT string longer than 65535 bytes");
  append_u16(out, s.size());
  out.insert(out.end(), s.begin(), s.end());
}

std::vector<std::uint8_t> frame(std::uint8_t header, const std::vector<std::uint8_t>& body) {
  std::vector<std::uint8_t> out{header};
  const auto len = encode_remaining_length(body.size());
  out.insert(out.end(), len.begin(), len.end());
  out.insert(out.end(), body.begin(), body.end());
  return out;
}

}  // namespace

std::vector<std::uint8_t> encode_remaining_length(std::size_t length) {
  if (length > 268'435'455) throw std::invalid_argument("MQTT packet too large");
  std::vector<std::uint8_t> out;
  do {
    std::uint8_t byte = length % 128;
    length /= 128;
    if (length > 0) byte |= 0x80;
    out.push_back(byte);
  } while (length > 0);
  return out;
}

std::vector<std::uint8_t> connect_packet(std::string_view client_id, std::uint16_t keep_alive_s) {
  std::vector<std::uint8_t> body;
  append_string(body, "MQTT");
  body.push_back(0x04);  // protocol level 3.1.1
  body.push_back(0x02);  // clean session
  append_u16(body, keep_alive_s);
  append_string(body, client_id);
  return frame(0x10, body);
}

std::vector<std::uint8_t> publish_packet(std::string_view topic, std::string_view payload) {
  std::vector<std::uint8_t> body;
  append_string(body, topic);
  body.insert(body.end(), payload.begin(), payload.end());
  return frame(0x30, body);  // QoS 0, no retain
}

std::vector<std::uint8_t> disconnect_packet() { return {0xE0, 0x00}; }

}  // namespace mqtt

MqttBridge::MqttBridge(const std::string& host, std::uint16_t port, const std::string& client_id) {
  addrinfo hints{};
  hints.ai_family = AF_UNSPEC;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* res = nullptr;
  const std::string service = std::to_string(port);
  if (const int rc = ::getaddrinfo(host.c_str(), service.c_str(), &hints, &res); rc != 0) {
    throw std::runtime_error("MQTT bridge: cannot resolve " + host + ": " + ::gai_strerror(rc));
  }
  for (addrinfo* ai = res; ai != nullptr; ai = ai->ai_next) {
    const int fd = ::socket(ai->ai_family, ai->ai_socktype, ai->ai_protocol);
    if (fd < 0) continue;
    if (::connect(fd, ai->ai_addr, ai->ai_addrlen) == 0) {
      fd_ = fd;
      break;
    }
    ::close(fd);
  }
  ::freeaddrinfo(res);
  if (fd_ < 0) throw std::runtime_error("MQTT bridge: cannot connect to " + host + ":" + service);

  send_all(mqtt::connect_packet(client_id, 60));
  std::uint8_t ack[4] = {};
  std::size_t got = 0;
  while (got < sizeof ack) {
    const ssize_t n = ::recv(fd_, ack + got, sizeof ack - got, 0);
    if (n <= 0) {
      ::close(fd_);
      throw std::runtime_error("MQTT bridge: connection closed before CONNACK");
    }
    got += static_cast<std::size_t>(n);
  }
  if (ack[0] != 0x20 || ack[1] != 0x02 || ack[3] != 0x00) {
    ::close(fd_);
    throw std::runtime_error("MQTT bridge: broker refused connection (code " +
                             std::to_string(ack[3]) + ")");
  }
}

MqttBridge::~MqttBridge() {
  if (fd_ < 0) return;
  const auto bye = mqtt::disconnect_packet();
  (void)::send(fd_, bye.data(), bye.size(), MSG_NOSIGNAL);
  ::close(fd_);
}

std::unique_ptr<MqttBridge> MqttBridge::from_environment(const std::string& client_id) {
  const char* host = std::getenv("MODBOT_MQTT_HOST");
  if (host == nullptr || *host == '\0') return nullptr;
  std::uint16_t port = 1883;
  if (const char* p = std::getenv("MODBOT_MQTT_PORT"); p != nullptr && *p != '\0') {
    char* end = nullptr;
    const long v = std::strtol(p, &end, 10);
    if (*end != '\0' || v <= 0 || v > 65535) {
      throw std::runtime_error(std::string("MODBOT_MQTT_PORT is not a valid port: ") + p);
    }
    port = static_cast<std::uint16_t>(v);
  }
  return std::make_unique<MqttBridge>(host, port, client_id);
}

void MqttBridge::publish(std::string_view topic, std::string_view payload) {
  send_all(mqtt::publish_packet(topic, payload));
  ++published_;
}

void MqttBridge::send_all(const std::vector<std::uint8_t>& bytes) {
  std::size_t sent = 0;
  while (sent < bytes.size()) {
    const ssize_t n = ::send(fd_, bytes.data() + sent, bytes.size() - sent, MSG_NOSIGNAL);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw std::runtime_error(std::string("MQTT bridge: send failed: ") + std::strerror(errno));
    }
    sent += static_cast<std::size_t>(n);
  }
}

}  // namespace modbot::transport
