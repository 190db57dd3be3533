#include <catch2/catch_amalgamated.hpp>

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cstdlib>
#include <thread>

#include "modbot/transport/mqtt_bridge.hpp"

using namespace modbot::transport;
using Bytes = std::vector<std::uint8_t>;

namespace {

Bytes bytes(std::initializer_list<int> xs) {
  Bytes out;
  for (int x : xs) out.push_back(static_cast<std::uint8_t>(x));
  return out;
}

// Accepts one client, answers CONNECT with the given return code and records
// everything the client sends until it closes the connection.
class FakeBroker {
 public:
  explicit FakeBroker(std::uint8_t return_code) {
    listen_fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
    addr.sin_port = 0;
    REQUIRE(::bind(listen_fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) == 0);
    REQUIRE(::listen(listen_fd_, 1) == 0);
    socklen_t len = sizeof addr;
    ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&addr), &len);
    port_ = ntohs(addr.sin_port);
    thread_ = std::thread([this, return_code] { serve(return_code); });
  }
  ~FakeBroker() {
    if (thread_.joinable()) thread_.join();
    ::close(listen_fd_);
  }
  std::uint16_t port() const { return port_; }
  const Bytes& received() {
    thread_.join();
    return received_;
  }

 private:
  void serve(std::uint8_t return_code) {
    const int fd = ::accept(listen_fd_, nullptr, nullptr);
    if (fd < 0) return;
    std::uint8_t buf[4096];
    bool answered = false;
    for (;;) {
      const auto n = ::recv(fd, buf, sizeof buf, 0);
      if (n <= 0) break;
      received_.insert(received_.end(), buf, buf + n);
      if (!answered) {
        const std::uint8_t connack[] = {0x20, 0x02, 0x00, return_code};
        ::send(fd, connack, sizeof connack, MSG_NOSIGNAL);
        answered = true;
      }
    }
    ::close(fd);
  }

  int listen_fd_ = -1;
  std::uint16_t port_ = 0;
  std::thread thread_;
  Bytes received_;
};

}  // namespace

TEST_CASE("remaining length uses base-128 continuation bytes", "[mqtt]") {
  CHECK(mqtt::encode_remaining_length(0) == bytes({0x00}));
  CHECK(mqtt::encode_remaining_length(127) == bytes({0x7F}));
  CHECK(mqtt::encode_remaining_length(128) == bytes({0x80, 0x01}));
  CHECK(mqtt::encode_remaining_length(16383) == bytes({0xFF, 0x7F}));
  CHECK(mqtt::encode_remaining_length(16384) == bytes({0x80, 0x80, 0x01}));
  CHECK(mqtt::encode_remaining_length(268'435'455) == bytes({0xFF, 0xFF, 0xFF, 0x7F}));
  CHECK_THROWS(mqtt::encode_remaining_length(268'435'456));
}

TEST_CASE("connect, publish and disconnect packets", "[mqtt]") {
  CHECK(mqtt::connect_packet("c1", 60) ==
        bytes({0x10, 14, 0x00, 0x04, 'M', 'Q', 'T', 'T', 0x04, 0x02, 0x00, 60, 0x00, 0x02, 'c', '1'}));
  CHECK(mqtt::publish_packet("a/b", "xy") == bytes({0x30, 7, 0x00, 0x03, 'a', '/', 'b', 'x', 'y'}));
  CHECK(mqtt::disconnect_packet() == bytes({0xE0, 0x00}));
  const std::string big(200, 'p');
  const auto pkt = mqtt::publish_packet("t", big);
  CHECK(pkt[1] == 0x80 + (203 % 128));
  CHECK(pkt[2] == 203 / 128);
  CHECK(pkt.size() == 3 + 203);
}

TEST_CASE("bridge forwards payloads to a broker", "[mqtt]") {
  FakeBroker broker(0x00);
  {
    MqttBridge bridge("127.0.0.1", broker.port(), "modbot-test");
    bridge.publish("modules/0/traj", "{\"x\":1}");
    bridge.publish("modules/1/status", "s");
    CHECK(bridge.published() == 2);
  }
  Bytes expected;
  for (const auto& part : {mqtt::publish_packet("modules/0/traj", "{\"x\":1}"),
                           mqtt::publish_packet("modules/1/status", "s"), mqtt::disconnect_packet()})
    expected.insert(expected.end(), part.begin(), part.end());
  const Bytes& got = broker.received();
  REQUIRE(got.size() > expected.size());
  CHECK(got[0] == 0x10);
  const Bytes tail(got.end() - static_cast<std::ptrdiff_t>(expected.size()), got.end());
  CHECK(tail == expected);
}

TEST_CASE("bridge reports a refused connection", "[mqtt]") {
  FakeBroker broker(0x05);
  CHECK_THROWS_AS(MqttBridge("127.0.0.1", broker.port(), "denied"), std::runtime_error);
}

TEST_CASE("bridge is disabled without a configured host", "[mqtt]") {
  ::unsetenv("MODBOT_MQTT_HOST");
  CHECK(MqttBridge::from_environment("x") == nullptr);
  ::setenv("MODBOT_MQTT_HOST", "127.0.0.1", 1);
  ::setenv("MODBOT_MQTT_PORT", "notaport", 1);
  CHECK_THROWS_AS(MqttBridge::from_environment("x"), std::runtime_error);
  ::unsetenv("MODBOT_MQTT_HOST");
  ::unsetenv("MODBOT_MQTT_PORT");
}
