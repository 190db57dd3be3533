#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace modbot::gaits {

/// A rational multiple of pi, kept in lowest terms with a positive denominator.
struct PiFraction {
  std::int64_t num = 0;
  std::int64_t den = 1;
  bool operator==(const PiFraction&) const = default;
};

/// Angle read from a gait file. Angles written as "p/q pi" keep their exact
/// fraction so that a catalog re-serializes to the same text and the same bits.
class Angle {
 public:
  Angle() = default;
  static Angle radians(double value);
  static Angle pi_times(std::int64_t num, std::int64_t den = 1);

  double value() const { return value_; }
  const std::optional<PiFraction>& fraction() const { return fraction_; }

  /// "p/q pi", "p pi", "0", or a round-trip decimal.
  std::string to_string() const;

  bool operator==(const Angle& other) const;

 private:
  double value_ = 0.0;
  std::optional<PiFraction> fraction_;
};

/// Parses "pi", "-pi", "3/4 pi", "-1/12pi", "2 pi" or a decimal number of
/// radians. Throws ParseError with the offset inside `text`.
Angle parse_angle(std::string_view text);

}  // namespace modbot::gaits
