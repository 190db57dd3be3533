#include "modbot/transport/scheduler.hpp"

#include <stdexcept>
#include <tuple>

namespace modbot::transport {

bool EventQueue::Later::operator()(const Event& a, const Event& b) const {
  return std::tie(a.time_us, a.module_id, a.seq, a.order) >
         std::tie(b.time_us, b.module_id, b.seq, b.order);
}

void EventQueue::schedule(std::int64_t time_us, int module_id, std::int64_t seq, Action action) {
  if (time_us < now_us_) throw std::logic_error("cannot schedule an event in the past");
  queue_.push(Event{time_us, module_id, seq, next_order_++, std::move(action)});
}

bool EventQueue::run_next() {
  if (queue_.empty()) return false;
  // The action may schedule more events, so pop before running it.
  Event ev = queue_.top();
  queue_.pop();
  now_us_ = ev.time_us;
  ev.action();
  return true;
}

void EventQueue::run_until(std::int64_t until_us) {
  while (!queue_.empty() && queue_.top().time_us <= until_us) run_next();
  if (until_us > now_us_) now_us_ = until_us;
}

}  // namespace modbot::transport
