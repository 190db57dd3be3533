#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <map>
#include <random>
#include <set>

#include "modbot/common/angles.hpp"
#include "modbot/common/errors.hpp"
#include "modbot/gaits/catalog.hpp"
#include "modbot/sim/direct_run.hpp"
#include "modbot/transport/bus.hpp"
#include "modbot/transport/channel.hpp"
#include "modbot/transport/codec.hpp"
#include "modbot/transport/master.hpp"
#include "modbot/transport/scheduler.hpp"

using namespace modbot;
using namespace modbot::transport;

namespace {

TrajectorySegmentMessage sample_message() {
  TrajectorySegmentMessage m;
  m.module_id = 1;
  m.seq = 42;
  m.start_time_ms = 150;
  m.sample_period_ms = 10;
  m.samples = {{0.1234567, -0.5, 0.0, 1.0, -2.3},
               {2.35619, -2.35619, 1e-9, -1e-9, 0.25}};
  return m;
}

std::size_t parse_error_offset(std::string_view text) {
  try {
    (void)decode(text);
  } catch (const ParseError& e) {
    return e.offset();
  }
  FAIL("decode accepted: " << text);
  return 0;
}

}  // namespace

TEST_CASE("angles encode with six fractional digits", "[transport][codec]") {
  CHECK(format_angle(0.1234567) == "0.123457");
  CHECK(format_angle(-0.0) == "0.000000");
  CHECK(format_angle(-1e-9) == "0.000000");
  CHECK(format_angle(-0.5) == "-0.500000");
  CHECK(format_angle(2.0) == "2.000000");
  CHECK(quantize_angle(0.1234567) == 0.123457);
}

TEST_CASE("segments encode canonically", "[transport][codec]") {
  TrajectorySegmentMessage m;
  m.module_id = 0;
  m.seq = 3;
  m.start_time_ms = 200;
  m.sample_period_ms = 10;
  m.samples = {{0.1234567, 0, -0.25, 1, -1}};
  CHECK(encode(m) ==
        R"({"module_id":0,"seq":3,"start_time_ms":200,"sample_period_ms":10,)"
        R"("samples":[[0.123457,0.000000,-0.250000,1.000000,-1.000000]]})");
}

TEST_CASE("decode inverts encode up to quantization", "[transport][codec]") {
  const auto m = sample_message();
  const auto back = decode(encode(m));
  CHECK(back.module_id == m.module_id);
  CHECK(back.seq == m.seq);
  CHECK(back.start_time_ms == m.start_time_ms);
  CHECK(back.sample_period_ms == m.sample_period_ms);
  REQUIRE(back.samples.size() == m.samples.size());
  for (std::size_t i = 0; i < m.samples.size(); ++i)
    for (int k = 0; k < kJoints; ++k) {
      CHECK(std::abs(back.samples[i][k] - m.samples[i][k]) <= 0.5e-6 + 1e-15);
      CHECK(back.samples[i][k] == quantize_angle(m.samples[i][k]));
    }
  // encoding is idempotent once quantized
  CHECK(encode(back) == encode(m));

  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> q(-kJointLimit, kJointLimit);
  for (int trial = 0; trial < 200; ++trial) {
    TrajectorySegmentMessage r;
    r.module_id = trial % 4;
    r.seq = trial;
    r.start_time_ms = 50 * trial;
    r.sample_period_ms = 10;
    r.samples.resize(1 + trial % 7);
    for (auto& s : r.samples)
      for (double& x : s) x = q(rng);
    const auto d = decode(encode(r));
    REQUIRE(encode(d) == encode(r));
  }
}

TEST_CASE("decoder accepts whitespace and any field order", "[transport][codec]") {
  const auto m = decode(
      " {\n \"samples\" : [ [0.1,0.2,0.3,0.4,0.5] ] , \"seq\":7,\"module_id\":2,"
      "\"sample_period_ms\":10,\"start_time_ms\":-50 }\n");
  CHECK(m.module_id == 2);
  CHECK(m.seq == 7);
  CHECK(m.start_time_ms == -50);
  CHECK(m.samples[0][4] == 0.5);
}

TEST_CASE("decoder rejects malformed payloads with byte offsets", "[transport][codec]") {
  const std::string good = encode(sample_message());
  for (std::size_t cut : {std::size_t{0}, std::size_t{1}, good.size() / 2, good.size() - 1}) {
    CAPTURE(cut);
    CHECK(parse_error_offset(good.substr(0, cut)) <= cut);
  }

  const std::string head = R"({"module_id":0,"seq":1,"start_time_ms":0,"sample_period_ms":10,)";
  CHECK(parse_error_offset(head + R"("samples":[[0,0,0,0,0]],"extra":1})") == head.size() + 24);
  CHECK(parse_error_offset(head + R"("samples":[[0,0,0,0]]})") == head.size() + 11);
  CHECK(parse_error_offset(head + R"("samples":[[0,0,0,0,0,0]]})") == head.size() + 22);
  CHECK(parse_error_offset(head + R"("samples":[[0,0,0,0,1e999]]})") == head.size() + 20);
  CHECK(parse_error_offset(head + R"("samples":[[0,0,0,0,NaN]]})") == head.size() + 20);
  CHECK(parse_error_offset(head + R"("samples":[[0,0,0,0,3.0]]})") == head.size() + 20);
  CHECK(parse_error_offset(head + R"("samples":[]})") > 0);
  CHECK(parse_error_offset(R"({"module_id":0,"module_id":0})") == 15);
  CHECK(parse_error_offset(R"({"module_id":1.5})") == 13);
  CHECK(parse_error_offset(R"({"module_id":0,"seq":1})") == 23);
  CHECK(parse_error_offset(good + "x") == good.size());
  CHECK(parse_error_offset(R"({"module_id":-1,"seq":1,"start_time_ms":0,"sample_period_ms":10,"samples":[[0,0,0,0,0]]})") > 0);
  CHECK(parse_error_offset(R"({"module_id":0,"seq":1,"start_time_ms":0,"sample_period_ms":0,"samples":[[0,0,0,0,0]]})") > 0);
}

TEST_CASE("encode refuses invalid segments", "[transport][codec]") {
  auto m = sample_message();
  m.samples.clear();
  CHECK_THROWS_AS(encode(m), InvalidParameter);
  m = sample_message();
  m.samples[0][0] = std::nan("");
  CHECK_THROWS_AS(encode(m), InvalidParameter);
  m = sample_message();
  m.samples[1][2] = 2.5;
  CHECK_THROWS_AS(encode(m), InvalidParameter);
  m = sample_message();
  m.sample_period_ms = 0;
  CHECK_THROWS_AS(encode(m), InvalidParameter);
}

TEST_CASE("status messages round-trip", "[transport][codec]") {
  const StatusMessage s{3, 17, 2, 850};
  CHECK(encode(s) == R"({"module_id":3,"last_seq_applied":17,"buffer_depth":2,"clock_ms":850})");
  CHECK(decode_status(encode(s)) == s);
  CHECK(decode_status(encode(StatusMessage{0, -1, 0, 0})).last_seq_applied == -1);
  CHECK_THROWS_AS(decode_status(R"({"module_id":3})"), ParseError);
  CHECK_THROWS_AS(decode_status(R"({"module_id":3,"last_seq_applied":1,"buffer_depth":0,"clock_ms":0,"x":1})"),
                  ParseError);
  CHECK(trajectory_topic(4) == "modules/4/traj");
  CHECK(status_topic(0) == "modules/0/status");
}

TEST_CASE("lossless channel delivers after exactly the latency", "[transport][channel]") {
  Channel ch({0.0, 5.0, 0.0, 9, std::nullopt});
  for (std::int64_t t : {0, 1000, 50'000, 123'457}) CHECK(ch.deliver(t) == t + 5000);
  CHECK(ch.sent() == 4);
  CHECK(ch.dropped() == 0);
}

TEST_CASE("channel configuration is validated", "[transport][channel]") {
  CHECK_THROWS_AS(Channel({1.0, 5.0, 0.0, 1, std::nullopt}), InvalidParameter);
  CHECK_THROWS_AS(Channel({-0.1, 5.0, 0.0, 1, std::nullopt}), InvalidParameter);
  CHECK_THROWS_AS(Channel({0.0, -1.0, 0.0, 1, std::nullopt}), InvalidParameter);
  CHECK_THROWS_AS(Channel({0.0, 5.0, -1.0, 1, std::nullopt}), InvalidParameter);
  CHECK_NOTHROW(Channel({0.999, 0.0, 0.0, 1, std::nullopt}));
}

TEST_CASE("channel replays identically for a fixed seed", "[transport][channel]") {
  const ChannelConfig cfg{0.3, 5.0, 2.0, 1234, std::nullopt};
  Channel a(cfg), b(cfg), c({0.3, 5.0, 2.0, 1235, std::nullopt});
  std::vector<std::optional<std::int64_t>> ra, rb, rc;
  for (int k = 0; k < 500; ++k) {
    ra.push_back(a.deliver(k * 10'000));
    rb.push_back(b.deliver(k * 10'000));
    rc.push_back(c.deliver(k * 10'000));
  }
  CHECK(ra == rb);
  CHECK(ra != rc);
}

TEST_CASE("channel loss rate and jitter window", "[transport][channel]") {
  for (double p : {0.1, 0.3, 0.5}) {
    Channel ch({p, 5.0, 2.0, 77, std::nullopt});
    const int n = 20000;
    for (int k = 0; k < n; ++k) {
      const auto d = ch.deliver(k * 1000);
      if (d) {
        REQUIRE(*d >= k * 1000 + 3000);
        REQUIRE(*d <= k * 1000 + 7000);
      }
    }
    const double rate = static_cast<double>(ch.dropped()) / n;
    // binomial standard deviation is below 0.0036 at n = 20000
    CHECK(std::abs(rate - p) < 0.02);
  }
  // large jitter never delivers before the send time
  Channel wide({0.0, 1.0, 10.0, 5, std::nullopt});
  for (int k = 0; k < 1000; ++k) REQUIRE(*wide.deliver(k) >= k);
}

TEST_CASE("loss can be confined to an initial window", "[transport][channel]") {
  Channel ch({0.9, 5.0, 0.0, 3, 1000.0});
  int dropped_late = 0;
  for (int k = 0; k < 200; ++k) {
    const std::int64_t t = k * 10'000;
    const auto d = ch.deliver(t);
    if (t >= 1'000'000 && !d) ++dropped_late;
  }
  CHECK(dropped_late == 0);
  CHECK(ch.dropped() > 50);
}

TEST_CASE("event queue orders by time, module, seq, insertion", "[transport][scheduler]") {
  EventQueue q;
  std::vector<std::string> order;
  q.schedule(2000, 1, 0, [&] { order.push_back("t2 m1"); });
  q.schedule(1000, 1, 5, [&] { order.push_back("t1 m1 s5"); });
  q.schedule(1000, 0, 9, [&] { order.push_back("t1 m0"); });
  q.schedule(1000, 1, 2, [&] { order.push_back("t1 m1 s2 a"); });
  q.schedule(1000, 1, 2, [&] { order.push_back("t1 m1 s2 b"); });
  q.schedule(1000, -1, 100, [&] {
    order.push_back("t1 master");
    q.schedule(1000, 5, 0, [&] { order.push_back("t1 m5 nested"); });
  });
  q.run_until(1500);
  CHECK(order == std::vector<std::string>{"t1 master", "t1 m0", "t1 m1 s2 a", "t1 m1 s2 b",
                                          "t1 m1 s5", "t1 m5 nested"});
  CHECK(q.now_us() == 1500);
  CHECK(q.pending() == 1);
  CHECK_THROWS_AS(q.schedule(1000, 0, 0, [] {}), std::logic_error);
  CHECK(q.run_next());
  CHECK(q.now_us() == 2000);
  CHECK_FALSE(q.run_next());
}

TEST_CASE("bus routes by topic through the channel", "[transport][bus]") {
  EventQueue q;
  Channel ch({0.0, 5.0, 0.0, 1, std::nullopt});
  Bus bus(q, ch);
  std::vector<std::pair<std::int64_t, std::string>> got;
  bus.subscribe("modules/0/traj", [&](std::string_view p) { got.emplace_back(q.now_us(), std::string(p)); });
  q.schedule(0, -1, 0, [&] {
    bus.publish("modules/0/traj", "a", 0, 0);
    bus.publish("modules/1/traj", "b", 1, 0);
  });
  q.run_until(100'000);
  REQUIRE(got.size() == 1);
  CHECK(got[0] == std::make_pair(std::int64_t{5000}, std::string("a")));
  CHECK(bus.log().size() == 2);
  CHECK(bus.log()[1].topic == "modules/1/traj");
  CHECK(bus.log()[1].deliver_us == 5000);
  CHECK(bus.delivered() == 2);
}

TEST_CASE("jitter may reorder deliveries", "[transport][bus]") {
  EventQueue q;
  Channel ch({0.0, 5.0, 4.9, 99, std::nullopt});
  Bus bus(q, ch);
  std::vector<int> seen;
  bus.subscribe("t", [&](std::string_view p) { seen.push_back(std::stoi(std::string(p))); });
  for (int k = 0; k < 50; ++k)
    q.schedule(k * 1000, -1, k, [&bus, k] { bus.publish("t", std::to_string(k), 0, k); });
  q.run_until(1'000'000);
  REQUIRE(seen.size() == 50);
  CHECK_FALSE(std::is_sorted(seen.begin(), seen.end()));
  CHECK(std::set<int>(seen.begin(), seen.end()).size() == 50);
}

TEST_CASE("master emits one segment per module per tick", "[transport][master]") {
  const auto sys = hierarchy::HierarchicalSystem(gaits::make_system_config(gaits::get_preset("snake_crawl")));
  Master master(sys, sys.initial_state(), {});
  for (int k = 0; k < 4; ++k) {
    const auto msgs = master.tick(50 * k);
    REQUIRE(msgs.size() == 2);
    for (int j = 0; j < 2; ++j) {
      CHECK(msgs[j].module_id == j);
      CHECK(msgs[j].seq == k);
      CHECK(msgs[j].start_time_ms == 50 * (k + 1));
      CHECK(msgs[j].sample_period_ms == 10);
      CHECK(msgs[j].samples.size() == 5);
    }
  }
  CHECK_THROWS_AS(master.tick(250), std::logic_error);
  CHECK_THROWS_AS(master.on_status({7, 0, 0, 0}), RoutingError);
  master.on_status({1, 3, 2, 200});
  master.on_status({1, 2, 3, 150});
  CHECK(master.latest_status()[1] == StatusMessage{1, 3, 2, 200});
  CHECK(master.status_received() == 2);
}

TEST_CASE("zero-amplitude preset streams the offsets", "[transport][master]") {
  auto preset = gaits::get_preset("snake_crawl");
  for (auto& m : preset.modules)
    for (auto& r : m.amplitudes) r = gaits::Angle::radians(0.0);
  const auto sys = hierarchy::HierarchicalSystem(gaits::make_system_config(preset));
  Master master(sys, sys.initial_state(), {});
  for (int k = 0; k < 10; ++k)
    for (const auto& msg : master.tick(50 * k))
      for (const auto& s : msg.samples)
        for (int i = 0; i < kJoints; ++i)
          REQUIRE(s[i] == preset.modules[msg.module_id].offsets[i].value());
}

TEST_CASE("concatenated segments equal the offline dense run", "[transport][master]") {
  const auto sys = hierarchy::HierarchicalSystem(gaits::make_system_config(gaits::get_preset("biped_walk")));
  sim::DirectRunOptions opts;
  opts.duration = 2.0;
  const auto dense = sim::run_direct(sys, opts);
  Master master(sys, sys.initial_state(), {});
  double worst = 0.0;
  for (int k = 0; k < 40; ++k) {
    for (const auto& msg : master.tick(50 * k)) {
      for (std::size_t i = 0; i < msg.samples.size(); ++i) {
        const std::size_t row = static_cast<std::size_t>(k) * 25 + i * 5;  // 10 ms = 5 steps of 2 ms
        for (int j = 0; j < kJoints; ++j)
          worst = std::max(worst, std::abs(msg.samples[i][j] - dense.modules[msg.module_id].q[row](j)));
      }
    }
  }
  CHECK(worst < 1e-9);
}

TEST_CASE("master rejects incompatible timing", "[transport][master]") {
  const auto sys = hierarchy::HierarchicalSystem(gaits::make_system_config(gaits::get_preset("single_roll")));
  CHECK_THROWS_AS(Master(sys, sys.initial_state(), {50, 15, 0.002}), InvalidParameter);
  CHECK_THROWS_AS(Master(sys, sys.initial_state(), {50, 10, 0.003}), InvalidParameter);
  CHECK(steps_per_span(50, 0.002) == 25);
  CHECK(steps_per_span(10, 0.001) == 10);
}
