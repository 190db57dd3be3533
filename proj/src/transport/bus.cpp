#include "modbot/transport/bus.hpp"

#include <memory>

#include "modbot/transport/mqtt_bridge.hpp"

namespace modbot::transport {

void Bus::subscribe(const std::string& topic, Handler handler) {
  subscribers_[topic].push_back(std::move(handler));
}

void Bus::publish(const std::string& topic, std::string payload, int module_id, std::int64_t seq) {
  const std::int64_t now = events_.now_us();
  if (bridge_ != nullptr) bridge_->publish(topic, payload);

  const auto when = channel_.deliver(now);
  log_.push_back(BusLogEntry{now, when.value_or(-1), topic, payload});
  if (!when) return;

  auto shared = std::make_shared<const std::string>(std::move(payload));
  events_.schedule(*when, module_id, seq, [this, topic, shared] {
    ++delivered_;
    const auto it = subscribers_.find(topic);
    if (it == subscribers_.end()) return;
    for (const auto& h : it->second) h(*shared);
  });
}

}  // namespace modbot::transport
