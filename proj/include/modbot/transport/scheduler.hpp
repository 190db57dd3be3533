#pragma once

#include <cstdint>
#include <functional>
#include <queue>
#include <vector>

namespace modbot::transport {

/// Discrete-event queue over a virtual microsecond clock. Events with equal
/// timestamps run in (module_id, seq, insertion) order, so a run is a pure
/// function of what was scheduled.
class EventQueue {
 public:
  using Action = std::function<void()>;

  /// Throws std::logic_error when `time_us` lies in the past.
  void schedule(std::int64_t time_us, int module_id, std::int64_t seq, Action action);

  /// Runs every event with timestamp <= `until_us`; the clock ends at `until_us`.
  void run_until(std::int64_t until_us);

  /// Runs the earliest event; false when the queue is empty.
  bool run_next();

  std::int64_t now_us() const { return now_us_; }
  std::size_t pending() const { return queue_.size(); }

 private:
  struct Event {
    std::int64_t time_us;
    int module_id;
    std::int64_t seq;
    std::uint64_t order;
    Action action;
  };
  struct Later {
    bool operator()(const Event& a, const Event& b) const;
  };

  std::priority_queue<Event, std::vector<Event>, Later> queue_;
  std::int64_t now_us_ = 0;
  std::uint64_t next_order_ = 0;
};

}  // namespace modbot::transport
