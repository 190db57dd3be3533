#include "modbot/gaits/angle_expr.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "modbot/common/angles.hpp"
#include "modbot/common/errors.hpp"

namespace modbot::gaits {

Angle Angle::radians(double value) {
  Angle a;
  a.value_ = value;
  if (value == 0.0) a.fraction_ = PiFraction{0, 1};
  return a;
}

Angle Angle::pi_times(std::int64_t num, std::int64_t den) {
  if (den == 0) throw InvalidParameter("angle fraction with zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  const std::int64_t g = std::gcd(num, den);
  if (g > 1) {
    num /= g;
    den /= g;
  }
  Angle a;
  a.fraction_ = PiFraction{num, den};
  a.value_ = num == 0 ? 0.0 : kPi * static_cast<double>(num) / static_cast<double>(den);
  return a;
}

std::string Angle::to_string() const {
  if (fraction_) {
    const auto [num, den] = *fraction_;
    if (num == 0) return "0";
    if (den == 1) return num == 1 ? "pi" : num == -1 ? "-pi" : std::to_string(num) + " pi";
    return std::to_string(num) + "/" + std::to_string(den) + " pi";
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", value_);
  return buf;
}

bool Angle::operator==(const Angle& other) const {
  return std::bit_cast<std::uint64_t>(value_) == std::bit_cast<std::uint64_t>(other.value_) &&
         fraction_ == other.fraction_;
}

namespace {

struct Cursor {
  std::string_view text;
  std::size_t pos = 0;

  void skip_space() {
    while (pos < text.size() && (text[pos] == ' ' || text[pos] == '\t')) ++pos;
  }
  bool done() const { return pos >= text.size(); }
  bool consume(std::string_view token) {
    if (text.substr(pos, token.size()) == token) {
      pos += token.size();
      return true;
    }
    return false;
  }
  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError("bad angle '" + std::string(text) + "': " + msg, pos);
  }
};

std::int64_t read_integer(Cursor& c) {
  std::int64_t v = 0;
  const char* first = c.text.data() + c.pos;
  const char* last = c.text.data() + c.text.size();
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc{} || ptr == first) c.fail("expected an integer");
  c.pos += static_cast<std::size_t>(ptr - first);
  return v;
}

}  // namespace

Angle parse_angle(std::string_view text) {
  Cursor c{text};
  c.skip_space();
  if (c.done()) c.fail("empty");

  // Pure decimal first; falls through to the pi grammar when "pi" follows.
  const std::size_t start = c.pos;
  const bool has_pi = text.find("pi") != std::string_view::npos;
  if (!has_pi) {
    double v = 0.0;
    const char* first = text.data() + start;
    const char* last = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc{} || ptr == first) c.fail("expected a number");
    c.pos = static_cast<std::size_t>(ptr - text.data());
    c.skip_space();
    if (!c.done()) c.fail("trailing characters");
    if (!std::isfinite(v)) c.fail("non-finite value");
    return Angle::radians(v);
  }

  std::int64_t sign = 1;
  if (c.consume("-")) {
    sign = -1;
  } else {
    c.consume("+");
  }
  c.skip_space();
  std::int64_t num = 1;
  std::int64_t den = 1;
  if (!c.consume("pi")) {
    num = read_integer(c);
    if (num < 0) c.fail("sign must precede the fraction");
    c.skip_space();
    if (c.consume("/")) {
      c.skip_space();
      den = read_integer(c);
      if (den <= 0) c.fail("denominator must be positive");
      c.skip_space();
    }
    if (!c.consume("pi")) c.fail("expected 'pi'");
  }
  c.skip_space();
  if (!c.done()) c.fail("trailing characters");
  return Angle::pi_times(sign * num, den);
}

}  // namespace modbot::gaits
