#include "modbot/transport/codec.hpp"

#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <optional>

#include "modbot/common/angles.hpp"
#include "modbot/common/errors.hpp"

namespace modbot::transport {

namespace {

// Angles on the wire are quantized to 1e-6 rad, so the joint limit itself
// may come back rounded outward by at most half a unit.
constexpr double kWireAngleLimit = kJointLimit + 1e-6;

void check_segment(const TrajectorySegmentMessage& msg) {
  if (msg.module_id < 0) throw InvalidParameter("module_id must be >= 0");
  if (msg.seq < 0) throw InvalidParameter("seq must be >= 0");
  if (msg.sample_period_ms <= 0) throw InvalidParameter("sample_period_ms must be > 0");
  if (msg.samples.empty()) throw InvalidParameter("segment has no samples");
  for (const auto& s : msg.samples) {
    for (double q : s) {
      if (!std::isfinite(q)) throw InvalidParameter("non-finite joint angle");
      if (std::abs(q) > kWireAngleLimit) throw InvalidParameter("joint angle outside 3pi/4 range");
    }
  }
}

class Reader {
 public:
  explicit Reader(std::string_view text) : text_(text) {}

  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, pos_); }
  [[noreturn]] void fail_at(const std::string& msg, std::size_t at) const {
    throw ParseError(msg, at);
  }

  void skip_ws() {
    while (pos_ < text_.size() &&
           (text_[pos_] == ' ' || text_[pos_] == '\n' || text_[pos_] == '\r' || text_[pos_] == '\t')) {
      ++pos_;
    }
  }

  void expect(char c) {
    skip_ws();
    if (pos_ >= text_.size()) fail(std::string("unexpected end of input, expected '") + c + "'");
    if (text_[pos_] != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  bool try_consume(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  std::size_t pos() const { return pos_; }

  void expect_end() {
    skip_ws();
    if (pos_ != text_.size()) fail("trailing bytes after message");
  }

  // Keys are plain ASCII identifiers; escapes are not part of the format.
  std::string key() {
    expect('"');
    const std::size_t start = pos_;
    while (pos_ < text_.size() && text_[pos_] != '"') {
      const char c = text_[pos_];
      if (c == '\\' || static_cast<unsigned char>(c) < 0x20) fail("unsupported character in key");
      ++pos_;
    }
    if (pos_ >= text_.size()) fail("unterminated string");
    std::string out(text_.substr(start, pos_ - start));
    ++pos_;
    return out;
  }

  std::int64_t integer() {
    skip_ws();
    const std::size_t start = pos_;
    const auto [len, is_integral] = scan_number();
    if (!is_integral) fail_at("expected an integer", start);
    std::int64_t v = 0;
    const auto [ptr, ec] = std::from_chars(text_.data() + start, text_.data() + start + len, v);
    if (ec != std::errc{} || ptr != text_.data() + start + len) fail_at("integer out of range", start);
    return v;
  }

  double real() {
    skip_ws();
    const std::size_t start = pos_;
    const auto [len, is_integral] = scan_number();
    (void)is_integral;
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(text_.data() + start, text_.data() + start + len, v);
    if (ec != std::errc{} || ptr != text_.data() + start + len || !std::isfinite(v)) {
      fail_at("non-finite or out-of-range number", start);
    }
    return v;
  }

 private:
  // JSON number grammar; returns token length and whether it is integral.
  std::pair<std::size_t, bool> scan_number() {
    const std::size_t start = pos_;
    auto digit = [&] { return pos_ < text_.size() && text_[pos_] >= '0' && text_[pos_] <= '9'; };
    bool integral = true;
    if (pos_ < text_.size() && text_[pos_] == '-') ++pos_;
    if (!digit()) {
      if (pos_ >= text_.size()) fail("unexpected end of input, expected a number");
      fail("expected a number");
    }
    if (text_[pos_] == '0') {
      ++pos_;
    } else {
      while (digit()) ++pos_;
    }
    if (pos_ < text_.size() && text_[pos_] == '.') {
      integral = false;
      ++pos_;
      if (!digit()) fail("expected digits after '.'");
      while (digit()) ++pos_;
    }
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      integral = false;
      ++pos_;
      if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
      if (!digit()) fail("expected exponent digits");
      while (digit()) ++pos_;
    }
    return {pos_ - start, integral};
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

// Iterates the members of one flat object, handing each key to `on_field`
// with the reader positioned at the value.
template <class OnField>
void read_object(Reader& r, OnField&& on_field) {
  r.expect('{');
  if (r.try_consume('}')) return;
  do {
    r.skip_ws();
    const std::size_t key_pos = r.pos();
    const std::string k = r.key();
    r.expect(':');
    on_field(k, key_pos);
  } while (r.try_consume(','));
  r.expect('}');
}

void append_int(std::string& out, std::int64_t v) {
  char buf[24];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  (void)ec;
  out.append(buf, ptr);
}

}  // namespace

std::string format_angle(double q) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", q);
  std::string s(buf);
  if (s == "-0.000000") s = "0.000000";
  return s;
}

double quantize_angle(double q) { return std::strtod(format_angle(q).c_str(), nullptr); }

std::string encode(const TrajectorySegmentMessage& msg) {
  check_segment(msg);
  std::string out;
  out.reserve(64 + msg.samples.size() * 60);
  out += "{\"module_id\":";
  append_int(out, msg.module_id);
  out += ",\"seq\":";
  append_int(out, msg.seq);
  out += ",\"start_time_ms\":";
  append_int(out, msg.start_time_ms);
  out += ",\"sample_period_ms\":";
  append_int(out, msg.sample_period_ms);
  out += ",\"samples\":[";
  for (std::size_t i = 0; i < msg.samples.size(); ++i) {
    if (i > 0) out += ',';
    out += '[';
    for (int k = 0; k < kJoints; ++k) {
      if (k > 0) out += ',';
      out += format_angle(msg.samples[i][k]);
    }
    out += ']';
  }
  out += "]}";
  return out;
}

TrajectorySegmentMessage decode(std::string_view bytes) {
  Reader r(bytes);
  TrajectorySegmentMessage msg;
  std::optional<std::int64_t> module_id, seq, start, period;
  bool have_samples = false;

  read_object(r, [&](const std::string& k, std::size_t key_pos) {
    auto once = [&](auto& slot) {
      if (slot) r.fail_at("duplicate field '" + k + "'", key_pos);
      slot = r.integer();
    };
    if (k == "module_id") {
      once(module_id);
    } else if (k == "seq") {
      once(seq);
    } else if (k == "start_time_ms") {
      once(start);
    } else if (k == "sample_period_ms") {
      once(period);
    } else if (k == "samples") {
      if (have_samples) r.fail_at("duplicate field 'samples'", key_pos);
      have_samples = true;
      r.expect('[');
      if (!r.try_consume(']')) {
        do {
          r.skip_ws();
          const std::size_t tuple_pos = r.pos();
          JointVector q{};
          r.expect('[');
          int count = 0;
          if (!r.try_consume(']')) {
            do {
              r.skip_ws();
              const std::size_t num_pos = r.pos();
              const double v = r.real();
              if (count >= kJoints) r.fail_at("sample has more than 5 joint angles", num_pos);
              if (std::abs(v) > kWireAngleLimit) r.fail_at("joint angle outside 3pi/4 range", num_pos);
              q[count++] = v;
            } while (r.try_consume(','));
            r.expect(']');
          }
          if (count != kJoints) r.fail_at("sample must have exactly 5 joint angles", tuple_pos);
          msg.samples.push_back(q);
        } while (r.try_consume(','));
        r.expect(']');
      }
    } else {
      r.fail_at("unknown field '" + k + "'", key_pos);
    }
  });
  r.expect_end();

  const std::size_t end = bytes.size();
  if (!module_id || !seq || !start || !period || !have_samples) {
    r.fail_at("missing field (need module_id, seq, start_time_ms, sample_period_ms, samples)", end);
  }
  if (*module_id < 0 || *module_id > INT32_MAX) r.fail_at("module_id out of range", end);
  if (*seq < 0) r.fail_at("seq must be >= 0", end);
  if (*period <= 0) r.fail_at("sample_period_ms must be > 0", end);
  if (msg.samples.empty()) r.fail_at("segment has no samples", end);
  msg.module_id = static_cast<int>(*module_id);
  msg.seq = *seq;
  msg.start_time_ms = *start;
  msg.sample_period_ms = *period;
  return msg;
}

std::string encode(const StatusMessage& msg) {
  if (msg.buffer_depth < 0) throw InvalidParameter("buffer_depth must be >= 0");
  std::string out = "{\"module_id\":";
  append_int(out, msg.module_id);
  out += ",\"last_seq_applied\":";
  append_int(out, msg.last_seq_applied);
  out += ",\"buffer_depth\":";
  append_int(out, msg.buffer_depth);
  out += ",\"clock_ms\":";
  append_int(out, msg.clock_ms);
  out += '}';
  return out;
}

StatusMessage decode_status(std::string_view bytes) {
  Reader r(bytes);
  std::optional<std::int64_t> module_id, last_seq, depth, clock;
  read_object(r, [&](const std::string& k, std::size_t key_pos) {
    std::optional<std::int64_t>* slot = nullptr;
    if (k == "module_id") slot = &module_id;
    else if (k == "last_seq_applied") slot = &last_seq;
    else if (k == "buffer_depth") slot = &depth;
    else if (k == "clock_ms") slot = &clock;
    else r.fail_at("unknown field '" + k + "'", key_pos);
    if (*slot) r.fail_at("duplicate field '" + k + "'", key_pos);
    *slot = r.integer();
  });
  r.expect_end();
  if (!module_id || !last_seq || !depth || !clock) {
    r.fail_at("missing status field", bytes.size());
  }
  if (*depth < 0) r.fail_at("buffer_depth must be >= 0", bytes.size());
  if (*module_id < 0 || *module_id > INT32_MAX) r.fail_at("module_id out of range", bytes.size());
  return StatusMessage{static_cast<int>(*module_id), *last_seq, *depth, *clock};
}

}  // namespace modbot::transport
