#pragma once

#include <cstdint>
#include <random>

namespace modbot {

/// Seeded generator whose draws are identical across standard libraries.
/// std::uniform_real_distribution is implementation-defined, so the unit
/// interval mapping is done by hand.
class DeterministicRng {
 public:
  explicit DeterministicRng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace modbot
